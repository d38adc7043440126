"""Scenario files: the JSON schema consumed by the command-line tools.

Parsing is strict -- unknown keys are rejected by name -- so a scenario
file is a trustworthy reproduction record.  ``Scenario.to_dict`` emits
exactly what ``parse_scenario`` accepts (round-trip stable).

Example:

    {
      "schema_version": 1,
      "flow": {"r_a": 80},
      "path": [{"avg_snr_db": 8.0}, {"avg_snr_db": 5.0, "k_a": 1016}],
      "defaults": {"k_a": 1016, "slot_ms": 10.0},
      "sim": {"num_superframes": 1000000, "seed": 1, "warmup": 0,
              "forwarding": "cut-through"},
      "targets": [0, 5, 10, 20],
      "model": {"kind": "ieee802154"}
    }
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .phy import FrameSpec, Ieee802154, LinkModel, Shannon, Snr, db_to_linear
from .sim import SimConfig
from .snc import FlowSpec, PathModel

__all__ = [
    "ScenarioError",
    "LinkSpec",
    "Scenario",
    "PowerSplitSpec",
    "parse_scenario",
    "load_scenario",
]

SCHEMA_VERSION = 1

DEFAULT_TARGETS = tuple(range(0, 31))


class ScenarioError(ValueError):
    """Malformed scenario input; the message names the offending key."""


@dataclass(frozen=True)
class LinkSpec:
    """One path entry as written in the file (dB, optional k_a override)."""

    avg_snr_db: float
    k_a: Optional[int] = None


@dataclass(frozen=True)
class Scenario:
    """Parsed scenario; builders produce the analysis/simulation models."""

    flow_r_a: float
    links: Tuple[LinkSpec, ...]
    default_k_a: int = 1016
    slot_ms: float = 10.0
    num_superframes: int = 100_000
    seed: int = 0
    warmup: int = 0
    cut_through: bool = True
    targets: Tuple[int, ...] = DEFAULT_TARGETS
    model_kind: str = "ieee802154"
    symbols_per_slot: int = 625

    @property
    def num_hops(self) -> int:
        return len(self.links)

    def service_kind(self, kind: str | None = None):
        kind = kind or self.model_kind
        if kind == "ieee802154":
            return Ieee802154()
        if kind == "shannon":
            return Shannon(self.symbols_per_slot)
        raise ScenarioError(f"unknown model kind '{kind}'")

    def flow(self) -> FlowSpec:
        return FlowSpec(self.flow_r_a)

    def path(self, kind: str | None = None, links: Tuple[LinkSpec, ...] | None = None) -> PathModel:
        service = self.service_kind(kind)
        frame_slot = self.slot_ms / 1000.0
        built = tuple(
            LinkModel(
                Snr(db_to_linear(spec.avg_snr_db)),
                FrameSpec(k_a=spec.k_a if spec.k_a is not None else self.default_k_a,
                          slot_duration=frame_slot),
                service,
            )
            for spec in (links if links is not None else self.links)
        )
        return PathModel(built)

    def sim_config(
        self,
        seed: int | None = None,
        targets: Tuple[int, ...] | None = None,
        path: PathModel | None = None,
    ) -> SimConfig:
        return SimConfig(
            path=path if path is not None else self.path("ieee802154"),
            flow=self.flow(),
            num_superframes=self.num_superframes,
            seed=self.seed if seed is None else seed,
            warmup_superframes=self.warmup,
            target_delays=targets if targets is not None else self.targets,
            cut_through=self.cut_through,
        )

    def to_dict(self) -> dict:
        path = []
        for spec in self.links:
            entry = {"avg_snr_db": spec.avg_snr_db}
            if spec.k_a is not None:
                entry["k_a"] = spec.k_a
            path.append(entry)
        return {
            "schema_version": SCHEMA_VERSION,
            "flow": {"r_a": self.flow_r_a},
            "path": path,
            "defaults": {"k_a": self.default_k_a, "slot_ms": self.slot_ms},
            "sim": {
                "num_superframes": self.num_superframes,
                "seed": self.seed,
                "warmup": self.warmup,
                "forwarding": "cut-through" if self.cut_through else "store-and-forward",
            },
            "targets": list(self.targets),
            "model": (
                {"kind": "ieee802154"}
                if self.model_kind == "ieee802154"
                else {"kind": "shannon", "symbols_per_slot": self.symbols_per_slot}
            ),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _require_keys(obj: dict, allowed: set, where: str) -> None:
    for key in obj:
        if key not in allowed:
            raise ScenarioError(f"unknown key '{where}.{key}'" if where else f"unknown key '{key}'")


def _number(obj, where):
    if isinstance(obj, bool) or not isinstance(obj, (int, float)) or not math.isfinite(obj):
        raise ScenarioError(f"'{where}' must be a finite number")
    return obj


def _integer(obj, where):
    value = _number(obj, where)
    if value != int(value):
        raise ScenarioError(f"'{where}' must be an integer")
    return int(value)


def parse_scenario(obj: dict) -> Scenario:
    if not isinstance(obj, dict):
        raise ScenarioError("scenario must be a JSON object")
    _require_keys(obj, {"schema_version", "flow", "path", "defaults", "sim", "targets", "model"}, "")

    if _integer(obj.get("schema_version", 0), "schema_version") != SCHEMA_VERSION:
        raise ScenarioError(f"schema_version must be {SCHEMA_VERSION}")

    flow = obj.get("flow")
    if not isinstance(flow, dict):
        raise ScenarioError("'flow' section is required")
    _require_keys(flow, {"r_a"}, "flow")
    r_a = _number(flow.get("r_a"), "flow.r_a")
    if r_a < 0:
        raise ScenarioError("'flow.r_a' must be non-negative")

    raw_path = obj.get("path")
    if not isinstance(raw_path, list) or not raw_path:
        raise ScenarioError("'path' must be a non-empty list of links")
    links = []
    for idx, entry in enumerate(raw_path):
        where = f"path[{idx}]"
        if not isinstance(entry, dict):
            raise ScenarioError(f"'{where}' must be an object")
        _require_keys(entry, {"avg_snr_db", "k_a"}, where)
        snr_db = _number(entry.get("avg_snr_db"), f"{where}.avg_snr_db")
        k_a = entry.get("k_a")
        if k_a is not None:
            k_a = _integer(k_a, f"{where}.k_a")
            if k_a < 1:
                raise ScenarioError(f"'{where}.k_a' must be at least 1")
        links.append(LinkSpec(snr_db, k_a))

    defaults = obj.get("defaults", {})
    if not isinstance(defaults, dict):
        raise ScenarioError("'defaults' must be an object")
    _require_keys(defaults, {"k_a", "slot_ms"}, "defaults")
    default_k_a = _integer(defaults.get("k_a", 1016), "defaults.k_a")
    slot_ms = _number(defaults.get("slot_ms", 10.0), "defaults.slot_ms")
    if default_k_a < 1 or slot_ms <= 0:
        raise ScenarioError("'defaults' values must be positive")

    sim = obj.get("sim", {})
    if not isinstance(sim, dict):
        raise ScenarioError("'sim' must be an object")
    _require_keys(sim, {"num_superframes", "seed", "warmup", "forwarding"}, "sim")
    num_superframes = _integer(sim.get("num_superframes", 100_000), "sim.num_superframes")
    seed = _integer(sim.get("seed", 0), "sim.seed")
    warmup = _integer(sim.get("warmup", 0), "sim.warmup")
    forwarding = sim.get("forwarding", "cut-through")
    if forwarding not in ("cut-through", "store-and-forward"):
        raise ScenarioError("'sim.forwarding' must be 'cut-through' or 'store-and-forward'")
    if num_superframes < 1 or not 0 <= warmup < num_superframes or not 0 <= seed < 2**64:
        raise ScenarioError("'sim' section has out-of-range values")

    raw_targets = obj.get("targets", list(DEFAULT_TARGETS))
    if not isinstance(raw_targets, list) or not raw_targets:
        raise ScenarioError("'targets' must be a non-empty list")
    targets = tuple(_integer(w, f"targets[{i}]") for i, w in enumerate(raw_targets))
    if any(w < 0 for w in targets):
        raise ScenarioError("'targets' must be non-negative")

    model = obj.get("model", {"kind": "ieee802154"})
    if not isinstance(model, dict):
        raise ScenarioError("'model' must be an object")
    _require_keys(model, {"kind", "symbols_per_slot"}, "model")
    model_kind = model.get("kind", "ieee802154")
    if model_kind not in ("ieee802154", "shannon"):
        raise ScenarioError("'model.kind' must be 'ieee802154' or 'shannon'")
    symbols_per_slot = _integer(model.get("symbols_per_slot", 625), "model.symbols_per_slot")
    if symbols_per_slot < 1:
        raise ScenarioError("'model.symbols_per_slot' must be positive")

    return Scenario(
        flow_r_a=r_a,
        links=tuple(links),
        default_k_a=default_k_a,
        slot_ms=slot_ms,
        num_superframes=num_superframes,
        seed=seed,
        warmup=warmup,
        cut_through=forwarding == "cut-through",
        targets=targets,
        model_kind=model_kind,
        symbols_per_slot=symbols_per_slot,
    )


def load_scenario(path) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            obj = json.load(handle)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario file is not valid JSON: {exc}") from exc
    return parse_scenario(obj)


@dataclass(frozen=True)
class PowerSplitSpec:
    """Equal split of a power budget over h hops spanning a fixed distance.

    Per-link SNR at hop count h:

        total_power_dbm - 10 log10(h) - PL(total_distance_m / h) - noise_floor_dbm

    with the log-distance pathloss PL(d) = reference_loss_db +
    10 * exponent * log10(d / reference_distance_m).  The pathloss defaults
    are engineering placeholders (not measured values); override them to
    match a deployment.
    """

    total_distance_m: float
    num_hops: int
    total_power_dbm: float = 4.0
    pathloss_exponent: float = 3.0
    reference_loss_db: float = 40.0
    reference_distance_m: float = 1.0
    noise_floor_dbm: float = -95.0

    def __post_init__(self) -> None:
        if not self.total_distance_m > 0.0:
            raise ValueError("total_distance_m must be positive")
        if self.num_hops < 1:
            raise ValueError("num_hops must be at least 1")
        if not self.reference_distance_m > 0.0:
            raise ValueError("reference_distance_m must be positive")

    def pathloss_db(self, distance_m: float) -> float:
        return self.reference_loss_db + 10.0 * self.pathloss_exponent * math.log10(
            distance_m / self.reference_distance_m
        )

    def per_link_snr_db(self, hops: int) -> float:
        if not 1 <= hops <= self.num_hops:
            raise ValueError("hops must lie in [1, num_hops]")
        hop_distance = self.total_distance_m / hops
        tx_power = self.total_power_dbm - 10.0 * math.log10(hops)
        return tx_power - self.pathloss_db(hop_distance) - self.noise_floor_dbm
