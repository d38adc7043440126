"""Physical-layer model of one TDMA mesh link.

A link transmits one frame per superframe in its dedicated slot.  The
O-QPSK bit error rate of the low-rate WPAN physical layer maps the
instantaneous SNR to a BER; a single bit error drops the whole frame
(CRC), so the per-slot service is Bernoulli: either ``k_a`` bits or
nothing.  Under Rayleigh block fading the slot SNR is exponentially
distributed, which gives the averaged frame-success probability
``q_success`` and, from it, the per-slot service transform used by the
delay analysis.  A Shannon-capacity service model is included as the
customary optimistic benchmark.

SNR is stored linearly; dB appears only at the conversion helpers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Union

import numpy as np

from .numerics import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    integrate_exp_weighted,
    log_upper_incomplete_gamma,
)

__all__ = [
    "Snr",
    "FrameSpec",
    "Ieee802154",
    "Shannon",
    "ServiceModelKind",
    "LinkModel",
    "db_to_linear",
    "linear_to_db",
    "ber",
    "ber_linear",
    "fer",
    "success_prob_linear",
    "q_success",
    "mellin_slot_service",
    "mellin_slot_service_shannon",
]


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(value: float) -> float:
    if not value > 0.0:
        raise ValueError("linear SNR must be positive to convert to dB")
    return 10.0 * math.log10(value)


@dataclass(frozen=True)
class Snr:
    """Linear (dimensionless) signal-to-noise ratio."""

    value: float

    def __post_init__(self) -> None:
        if not self.value >= 0.0:
            raise ValueError("SNR must be non-negative")

    @classmethod
    def from_db(cls, db: float) -> "Snr":
        return cls(db_to_linear(db))

    @property
    def db(self) -> float:
        return linear_to_db(self.value)


@dataclass(frozen=True)
class FrameSpec:
    """Frame payload capacity (bits per slot) and the slot duration."""

    k_a: int = 1016
    slot_duration: float = 0.010

    def __post_init__(self) -> None:
        if self.k_a < 1:
            raise ValueError("k_a must be at least 1 bit")
        if not self.slot_duration > 0.0:
            raise ValueError("slot_duration must be positive")


@dataclass(frozen=True)
class Ieee802154:
    """All-or-nothing frame service from the 802.15.4 O-QPSK BER curve."""


@dataclass(frozen=True)
class Shannon:
    """Capacity-achieving service: symbols_per_slot * log(1 + snr) per slot."""

    symbols_per_slot: int = 625

    def __post_init__(self) -> None:
        if self.symbols_per_slot < 1:
            raise ValueError("symbols_per_slot must be positive")


ServiceModelKind = Union[Ieee802154, Shannon]


@dataclass(frozen=True)
class LinkModel:
    """One wireless hop: mean SNR of the exponential fading distribution,
    frame parameters, and the service model used for analysis."""

    avg_snr: Snr
    frame: FrameSpec = field(default_factory=FrameSpec)
    kind: ServiceModelKind = field(default_factory=Ieee802154)

    def __post_init__(self) -> None:
        if not self.avg_snr.value > 0.0:
            raise ValueError("average SNR must be positive")

    @classmethod
    def from_db(cls, avg_snr_db: float, k_a: int = 1016, kind: ServiceModelKind | None = None) -> "LinkModel":
        return cls(Snr.from_db(avg_snr_db), FrameSpec(k_a=k_a), kind or Ieee802154())


# O-QPSK BER: p(g) = (1/30) * sum_{u=2}^{16} (-1)^u C(16,u) exp(-20 g (1 - 1/u)).
# Coefficients kept as exact integers; the division by 30 happens after the
# sum so that p(0) comes out as exactly 15/30 = 0.5.
_BER_TERMS = tuple(
    ((-1) ** u * comb(16, u), -20.0 * (1.0 - 1.0 / u)) for u in range(2, 17)
)


def ber_linear(gamma):
    """Bit error rate at linear SNR ``gamma``; accepts scalars or ndarrays.

    Clamped to [0, 1] against floating-point noise in the alternating sum.
    """
    if isinstance(gamma, np.ndarray):
        acc = np.zeros(gamma.shape, dtype=float)
        for coef, rate in _BER_TERMS:
            acc += coef * np.exp(rate * gamma)
        return np.clip(acc / 30.0, 0.0, 1.0)
    g = float(gamma)
    total = math.fsum(coef * math.exp(rate * g) for coef, rate in _BER_TERMS) / 30.0
    return min(max(total, 0.0), 1.0)


def ber(gamma: Snr) -> float:
    """Bit error rate of one 802.15.4 O-QPSK symbol stream at SNR ``gamma``."""
    return ber_linear(gamma.value)


def success_prob_linear(gamma, k_a: int):
    """(1 - p(gamma))^k_a, evaluated as exp(k_a * log1p(-p)) so that frame
    sizes around 1000 bits neither underflow nor lose the tiny-p regime."""
    p = ber_linear(gamma)
    if isinstance(p, np.ndarray):
        return np.exp(k_a * np.log1p(-p))
    if p >= 1.0:
        return 0.0
    return math.exp(k_a * math.log1p(-p))


def fer(gamma: Snr, frame: FrameSpec) -> float:
    """Frame error rate 1 - (1 - p(gamma))^k_a."""
    p = ber_linear(gamma.value)
    if p >= 1.0:
        return 1.0
    return -math.expm1(frame.k_a * math.log1p(-p))


def q_success(link: LinkModel, spec: QuadratureSpec | None = None) -> float:
    """Fading-averaged frame success probability of one link.

    Q(mean) = int_0^inf (1 - p(y))^k_a (1/mean) exp(-y/mean) dy, by
    quadrature.  Values are memoized per (mean SNR, k_a, tolerance): the
    multi-hop recursion re-evaluates the same link's transform many times.
    """
    if not isinstance(link.kind, Ieee802154):
        raise ValueError("q_success is defined for the 802.15.4 service model")
    spec = spec or DEFAULT_QUADRATURE
    return _q_cached(link.avg_snr.value, link.frame.k_a, spec.relative_tolerance, spec.max_refinements)


@lru_cache(maxsize=None)
def _q_cached(gamma_bar: float, k_a: int, rtol: float, max_refinements: int) -> float:
    spec = QuadratureSpec(rtol, max_refinements)
    value = integrate_exp_weighted(lambda y: success_prob_linear(y, k_a), gamma_bar, spec)
    return min(max(value, 0.0), 1.0)


def _log_mellin_from_q(t: float, q: float) -> float:
    """log(1 + (e^t - 1) q) for t <= 0 and q in [0, 1].

    This is the log of the per-slot service transform with exponent t; the
    log-sum-exp form stays accurate when q -> 1 makes the plain expression
    cancel.
    """
    if q <= 0.0:
        return 0.0
    if q >= 1.0:
        return t
    return float(np.logaddexp(math.log1p(-q), t + math.log(q)))


def mellin_slot_service(s: float, link: LinkModel) -> float:
    """Per-slot service transform E[exp(X (s-1))] of a Bernoulli
    {0, k_a}-bit frame service.

    Exact 1.0 at s = 1 (normalization).  For s < 1 the value is computed
    in log space; for s > 1 it may overflow, reported as +inf.
    """
    if not isinstance(link.kind, Ieee802154):
        raise ValueError("mellin_slot_service is defined for the 802.15.4 service model")
    if s == 1.0:
        return 1.0
    q = q_success(link)
    t = link.frame.k_a * (s - 1.0)
    if t > 0.0:
        try:
            return 1.0 + math.expm1(t) * q
        except OverflowError:
            return math.inf
    return math.exp(_log_mellin_from_q(t, q))


def _log_mellin_shannon(arg: float, gamma_bar: float, symbols_per_slot: int) -> float:
    """log of the per-slot transform of the Shannon service at transform
    argument ``arg``:

        exp(1/mean) * mean^((arg-1) C') * Gamma(1 + (arg-1) C', 1/mean)

    with C' = symbols_per_slot / log 2.  +inf when the incomplete-gamma
    recurrence chain would cross a non-positive integer order.
    """
    if arg == 1.0:
        return 0.0
    cap = symbols_per_slot / math.log(2.0)
    c = (arg - 1.0) * cap
    a = 1.0 + c
    if a < 0.5 and abs(a - round(a)) < 1e-12:
        return math.inf
    x = 1.0 / gamma_bar
    log_gamma = log_upper_incomplete_gamma(a, x)
    if log_gamma == math.inf:
        return math.inf
    return x + c * math.log(gamma_bar) + log_gamma


def mellin_slot_service_shannon(arg: float, link: LinkModel) -> float:
    """Per-slot service transform of the Shannon benchmark, evaluated
    directly at transform argument ``arg`` (the delay kernel uses
    ``arg = 1 - s``).  Exact 1.0 at arg = 1; +inf at order poles of the
    evaluation chain, which downstream treats as infeasible."""
    if not isinstance(link.kind, Shannon):
        raise ValueError("mellin_slot_service_shannon requires a Shannon-kind link")
    if arg == 1.0:
        return 1.0
    log_m = _log_mellin_shannon(arg, link.avg_snr.value, link.kind.symbols_per_slot)
    if log_m == math.inf:
        return math.inf
    try:
        return math.exp(log_m)
    except OverflowError:
        return math.inf
