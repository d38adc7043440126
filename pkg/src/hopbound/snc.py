"""Delay-violation analysis of a multi-hop slotted path.

The cumulative arrival and service processes are handled through their
exponential-domain transforms: the per-slot service transform of each
link (``phy``) and the constant-rate arrival transform combine into a
steady-state kernel K(s, -w) that bounds Pr[delay > w superframes] for
every s > 0.  The reported bound is the infimum of the kernel over s,
clamped to 1.

Single hop, in log space:

    K(s, -w) = M^w / (1 - exp(r_a s) M),   M = 1 + (exp(-k_a s) - 1) Q,

finite iff the geometric sum behind it converges, i.e.
``r_a < -log(M)/s`` (the stability limit).  Multi-hop kernels follow a
two-term recursion that removes one link at a time; its value depends
only on the multiset of links, not their order, which the tests assert.
The recursion needs pairwise-distinct per-link transforms, so identical
links are separated by a deterministic micro-perturbation of their mean
SNR (reported in the result).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .numerics import NoFeasiblePointError, minimize_scalar
from .phy import (
    Ieee802154,
    LinkModel,
    Shannon,
    Snr,
    _log_mellin_from_q,
    _log_mellin_shannon,
    q_success,
)

__all__ = [
    "FlowSpec",
    "PathModel",
    "QosTarget",
    "BoundResult",
    "S_SEARCH_DOMAIN",
    "mellin_arrival",
    "single_hop_kernel",
    "stability_max_rate",
    "multi_hop_kernel",
    "delay_bound",
    "delay_bound_shannon",
    "min_delay_for_epsilon",
]

# Search domain and resolution for the free kernel parameter s.  The upper
# end keeps exp(r_a * s) finite for arrival rates up to ~1e4 bits; the grid
# is log-spaced because useful s spans several decades.
S_SEARCH_DOMAIN = (1e-7, 5.0)
_S_GRID_POINTS = 128
_S_REFINE_TOL = 1e-9

# Two per-link transforms closer than this (relative) make the recursion
# denominator meaningless; such evaluation points are reported infeasible.
_MELLIN_MATCH_RTOL = 1e-9

# Identical links are pre-separated by +/- (index * this many dB).
_PERTURB_DB_STEP = 1e-6


@dataclass(frozen=True)
class FlowSpec:
    """Constant arrival: r_a bits enter the path per superframe."""

    r_a: float

    def __post_init__(self) -> None:
        if not self.r_a >= 0.0:
            raise ValueError("arrival payload r_a must be non-negative")


@dataclass(frozen=True)
class PathModel:
    """Ordered links of the path; link j transmits in slot j of each
    superframe (one slot per link)."""

    links: Tuple[LinkModel, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "links", tuple(self.links))
        if len(self.links) == 0:
            raise ValueError("a path needs at least one link")

    def __len__(self) -> int:
        return len(self.links)


@dataclass(frozen=True)
class QosTarget:
    """Target delay (whole superframes) and tolerated violation probability."""

    w: int
    epsilon: float

    def __post_init__(self) -> None:
        if self.w < 0:
            raise ValueError("target delay must be non-negative")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")


@dataclass(frozen=True)
class BoundResult:
    """Optimized delay-violation bound plus stability diagnostics.

    ``per_link_mellin`` holds each link's service transform at the
    optimizing parameter (path order, after any micro-perturbation);
    ``perturbed_links`` lists 0-based indices of links whose mean SNR was
    nudged to break transform ties.
    """

    violation_probability: float
    optimizing_s: float
    stable: bool
    per_link_mellin: Tuple[float, ...] = ()
    perturbed_links: Tuple[int, ...] = ()


def _exp_or_inf(x: float) -> float:
    if x == math.inf:
        return math.inf
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def mellin_arrival(s: float, flow: FlowSpec, interval_length: int) -> float:
    """Transform of the cumulative arrivals over ``interval_length``
    superframes: exp(r_a * interval_length * (s - 1))."""
    if interval_length < 0:
        raise ValueError("interval_length must be non-negative")
    return _exp_or_inf(flow.r_a * interval_length * (s - 1.0))


def _log_slot_mellin(s: float, link: LinkModel) -> float:
    """log of the link's per-slot service transform at argument (1 - s)."""
    if isinstance(link.kind, Shannon):
        return _log_mellin_shannon(1.0 - s, link.avg_snr.value, link.kind.symbols_per_slot)
    return _log_mellin_from_q(-link.frame.k_a * s, q_success(link))


def _log_single_kernel(s: float, w: int, r_a: float, log_m: float) -> float:
    """log K for one link, or +inf when unstable at this s."""
    if log_m == math.inf:
        return math.inf
    z = r_a * s + log_m
    if not z < 0.0:
        return math.inf
    return w * log_m - math.log(-math.expm1(z))


def single_hop_kernel(s: float, w: int, flow: FlowSpec, link: LinkModel) -> float:
    """Steady-state kernel of a single link; +inf encodes instability at
    this s, never an exception."""
    _check_s_w(s, w)
    return _exp_or_inf(_log_single_kernel(s, w, flow.r_a, _log_slot_mellin(s, link)))


def stability_max_rate(s: float, link: LinkModel) -> float:
    """Supremum arrival rate (bits/superframe) with a convergent kernel at
    this s: -log(M(1-s)) / s."""
    if not s > 0.0:
        raise ValueError("s must be positive")
    log_m = _log_slot_mellin(s, link)
    if log_m == math.inf:
        return -math.inf
    return 0.0 if log_m == 0.0 else -log_m / s


def _sort_key(link: LinkModel):
    kind_tag = (1, link.kind.symbols_per_slot) if isinstance(link.kind, Shannon) else (0, 0)
    return (link.avg_snr.value, link.frame.k_a, kind_tag)


def _prepare_links(links: Sequence[LinkModel]) -> Tuple[Tuple[LinkModel, ...], Tuple[int, ...]]:
    """Break exact/near ties in (mean SNR, frame, kind) by nudging every
    member of a tied group by alternating +/- (1-based index) * 1e-6 dB.

    Deterministic and applied once per analysis, so the optimization
    objective stays a fixed function of s.
    """
    n = len(links)
    if n == 1:
        return tuple(links), ()
    order = sorted(range(n), key=lambda i: _sort_key(links[i]))
    tied: set[int] = set()
    for a, b in zip(order, order[1:]):
        la, lb = links[a], links[b]
        if la.kind != lb.kind or la.frame.k_a != lb.frame.k_a:
            continue
        ga, gb = la.avg_snr.value, lb.avg_snr.value
        if abs(ga - gb) <= 1e-12 * max(ga, gb):
            tied.update((a, b))
    if not tied:
        return tuple(links), ()
    adjusted = list(links)
    for i in sorted(tied):
        k = i + 1
        delta_db = (1.0 if k % 2 else -1.0) * k * _PERTURB_DB_STEP
        link = links[i]
        adjusted[i] = LinkModel(
            Snr(link.avg_snr.value * 10.0 ** (delta_db / 10.0)), link.frame, link.kind
        )
    return tuple(adjusted), tuple(sorted(tied))


def _multi_kernel_value(s: float, w: int, r_a: float, links_sorted: Sequence[LinkModel]) -> float:
    """Kernel of a canonically sorted link list; +inf where infeasible."""
    log_ms = [_log_slot_mellin(s, link) for link in links_sorted]
    for log_m in log_ms:
        if log_m == math.inf or not r_a * s + log_m < 0.0:
            return math.inf

    n = len(links_sorted)
    if n == 1:
        return _exp_or_inf(_log_single_kernel(s, w, r_a, log_ms[0]))

    ms = [math.exp(log_m) for log_m in log_ms]
    memo: Dict[Tuple[int, int], float] = {}

    def kernel(i: int, j: int) -> float:
        if i == j:
            return _exp_or_inf(_log_single_kernel(s, w, r_a, log_ms[i]))
        key = (i, j)
        cached = memo.get(key)
        if cached is not None:
            return cached
        m_first, m_last = ms[i], ms[j]
        if abs(m_last - m_first) < _MELLIN_MATCH_RTOL * max(m_last, m_first):
            value = math.inf
        else:
            without_first = kernel(i + 1, j)
            without_last = kernel(i, j - 1)
            if without_first == math.inf or without_last == math.inf:
                value = math.inf
            else:
                value = m_last / (m_last - m_first) * without_first + m_first / (
                    m_first - m_last
                ) * without_last
                if not value > 0.0:  # cancellation noise; the true kernel is positive
                    value = math.inf
        memo[key] = value
        return value

    return kernel(0, n - 1)


def multi_hop_kernel(s: float, w: int, flow: FlowSpec, path: PathModel) -> float:
    """End-to-end kernel of the path via the link-removal recursion,
    memoized on sub-multisets of links.  +inf where any link is unstable
    at this s or transforms collide."""
    _check_s_w(s, w)
    links, _ = _prepare_links(path.links)
    links_sorted = sorted(links, key=_sort_key)
    return _multi_kernel_value(s, w, flow.r_a, links_sorted)


def delay_bound(flow: FlowSpec, path: PathModel, w: int) -> BoundResult:
    """Minimize the end-to-end kernel over s and clamp to a probability.

    Unstable flows (no feasible s anywhere on the search grid) yield
    probability 1.0 with ``stable=False``.
    """
    if w < 0:
        raise ValueError("target delay w must be non-negative")
    links, perturbed = _prepare_links(path.links)
    links_sorted = sorted(links, key=_sort_key)

    def objective(s: float) -> float:
        return _multi_kernel_value(s, w, flow.r_a, links_sorted)

    try:
        s_star, kernel_min = minimize_scalar(
            objective, *S_SEARCH_DOMAIN, tol=_S_REFINE_TOL, grid_points=_S_GRID_POINTS
        )
    except NoFeasiblePointError:
        return BoundResult(1.0, math.nan, False, (), perturbed)

    probability = min(max(kernel_min, 0.0), 1.0)
    per_link = tuple(_exp_or_inf(_log_slot_mellin(s_star, link)) for link in links)
    return BoundResult(probability, s_star, True, per_link, perturbed)


def delay_bound_shannon(flow: FlowSpec, link: LinkModel, w: int) -> BoundResult:
    """Delay bound of a single link under the Shannon service benchmark."""
    if not isinstance(link.kind, Shannon):
        raise ValueError("delay_bound_shannon requires a Shannon-kind link")
    return delay_bound(flow, PathModel((link,)), w)


def min_delay_for_epsilon(flow: FlowSpec, path: PathModel, epsilon: float) -> Optional[int]:
    """Smallest target delay w whose bound is <= epsilon, or None when the
    flow is unstable (no finite delay target exists)."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")

    first = delay_bound(flow, path, 0)
    if not first.stable:
        return None
    if first.violation_probability <= epsilon:
        return 0

    lo, hi = 0, 1
    while delay_bound(flow, path, hi).violation_probability > epsilon:
        lo, hi = hi, hi * 2
        if hi > 1_000_000_000:
            raise RuntimeError("target-delay search exceeded 1e9 superframes")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if delay_bound(flow, path, mid).violation_probability <= epsilon:
            hi = mid
        else:
            lo = mid
    return hi


def _check_s_w(s: float, w: int) -> None:
    if not s > 0.0:
        raise ValueError("s must be positive")
    if w < 0:
        raise ValueError("target delay w must be non-negative")
