"""Seeded Monte Carlo simulator of the round-robin superframe system.

Per superframe: fresh payload enters the source queue, then every link in
its slot draws an SNR from its exponential fading distribution, turns it
into a frame-success Bernoulli through the BER/FER chain, and forwards up
to one frame of queued bits.  Block delays (in whole superframes, 0 for a
same-superframe traversal) and the empirical delay-violation frequencies
come out of the departure record.

Randomness: one counter-based Philox stream per link, keyed as
``(link_index << 64) | seed``, consumed as two uniform arrays (SNR draws,
then success draws).  Exponential sampling is by inverse transform, so
with a fixed seed raising a link's mean SNR can only turn failures into
successes -- delays never increase (monotone coupling).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from . import backend as _backend
from .phy import Ieee802154, LinkModel, Snr, ber_linear
from .snc import FlowSpec, PathModel

__all__ = [
    "SimConfig",
    "PayloadBlock",
    "SimReport",
    "make_link_rng",
    "sample_snr",
    "run",
    "empirical_violation",
]

IN_FLIGHT = -1  # departure marker for blocks still in the network


@dataclass(frozen=True)
class SimConfig:
    """One simulation run: path, flow, horizon, seed, and reporting targets.

    ``cut_through=False`` switches to store-and-forward, where bits wait at
    least one superframe per hop.
    """

    path: PathModel
    flow: FlowSpec
    num_superframes: int
    seed: int
    warmup_superframes: int = 0
    target_delays: Tuple[int, ...] = ()
    cut_through: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "target_delays", tuple(int(w) for w in self.target_delays))
        if self.num_superframes < 1:
            raise ValueError("num_superframes must be at least 1")
        if not 0 <= self.warmup_superframes < self.num_superframes:
            raise ValueError("warmup_superframes must lie in [0, num_superframes)")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if any(w < 0 for w in self.target_delays):
            raise ValueError("target delays must be non-negative")
        if self.flow.r_a != int(self.flow.r_a):
            raise ValueError("the simulator moves whole bits; r_a must be an integer")
        for link in self.path.links:
            if not isinstance(link.kind, Ieee802154):
                raise ValueError("the simulator models the 802.15.4 frame service only")


@dataclass(frozen=True)
class PayloadBlock:
    """One superframe's worth of payload tracked end to end."""

    size: int
    arrival_superframe: int
    departure_superframe: int  # IN_FLIGHT when still queued at the end

    @property
    def delay(self) -> int:
        if self.departure_superframe == IN_FLIGHT:
            raise ValueError("block has not departed")
        return self.departure_superframe - self.arrival_superframe


@dataclass(frozen=True, eq=False)
class SimReport:
    """Empirical delays and violation estimates of one run.

    ``block_delays[i]`` is the delay of the i-th counted block (arrival
    order); ``violation_estimates[w]`` is (fraction of blocks with delay
    strictly greater than w, sample count).
    """

    block_delays: np.ndarray
    violation_estimates: Dict[int, Tuple[float, int]]
    per_link_success_rate: Tuple[float, ...]
    unfinished_blocks: int
    backend: str


def make_link_rng(seed: int, link_index: int) -> np.random.Generator:
    """Independent counter-based stream for one link."""
    return np.random.Generator(np.random.Philox(key=(link_index << 64) | seed))


def sample_snr(rng: np.random.Generator, avg_snr: Snr) -> Snr:
    """One exponential SNR draw by inverse transform (monotone in the
    underlying uniform)."""
    if not avg_snr.value > 0.0:
        raise ValueError("average SNR must be positive")
    return Snr(-avg_snr.value * math.log1p(-rng.random()))


def _draw_success_matrix(config: SimConfig) -> np.ndarray:
    """Frame-success indicators for every (superframe, link) cell.

    Channel outcomes do not depend on queue contents, so the whole matrix
    is drawn up front: per link, SNR uniforms then success uniforms.
    """
    links = config.path.links
    num = config.num_superframes
    success = np.empty((num, len(links)), dtype=np.uint8)
    for j, link in enumerate(links):
        rng = make_link_rng(config.seed, j)
        gamma = -link.avg_snr.value * np.log1p(-rng.random(num))
        u_success = rng.random(num)
        frame_success_prob = np.exp(link.frame.k_a * np.log1p(-ber_linear(gamma)))
        success[:, j] = u_success < frame_success_prob
    return success


def run(config: SimConfig, *, backend: str | None = None) -> SimReport:
    """Simulate the configured path and summarize per-block delays.

    Blocks arriving before ``warmup_superframes`` and blocks still in
    flight at the end are excluded from the statistics (the in-flight
    count is reported).  Identical configs (same seed) give bit-identical
    reports.
    """
    loop = _backend.get_loop(backend)
    backend_name = backend or _backend.DEFAULT_BACKEND

    success = _draw_success_matrix(config)
    r_a = int(config.flow.r_a)
    k_a = np.array([link.frame.k_a for link in config.path.links], dtype=np.int64)
    departed_cum, queued_total, _final_queues = loop(success, r_a, k_a, config.cut_through)

    num = config.num_superframes
    arrivals = np.arange(num, dtype=np.int64)
    arrived_cum = (arrivals + 1) * r_a
    if not np.array_equal(arrived_cum, departed_cum + queued_total):
        raise RuntimeError("bit conservation violated by the queue backend")

    # Block b departs in the first superframe whose cumulative departures
    # cover its last bit; FIFO makes this a searchsorted on the departure
    # record.
    departure = np.searchsorted(departed_cum, arrived_cum, side="left")
    completed = departure < num
    delays = np.maximum(departure - arrivals, 0)

    eligible = arrivals >= config.warmup_superframes
    counted = completed & eligible
    block_delays = delays[counted].astype(np.int64)
    unfinished = int(np.count_nonzero(~completed & eligible))

    estimates: Dict[int, Tuple[float, int]] = {}
    if block_delays.size:
        for w in config.target_delays:
            estimates[int(w)] = empirical_violation(block_delays, int(w))

    rates = tuple(float(r) for r in success.mean(axis=0))
    return SimReport(block_delays, estimates, rates, unfinished, backend_name)


def empirical_violation(delays, w: int) -> Tuple[float, int]:
    """Fraction of delays strictly greater than w, with the sample count."""
    arr = np.asarray(delays)
    if arr.size == 0:
        raise ValueError("no delay samples")
    violations = int(np.count_nonzero(arr > w))
    return violations / arr.size, int(arr.size)
