"""Shared numeric routines for the analysis core.

Three building blocks live here:

* ``integrate_exp_weighted`` -- integrals of the form
  ``int_0^inf f(y) (1/mean) exp(-y/mean) dy``, i.e. expectations under an
  exponential distribution.  Gauss-Laguerre with order doubling is the
  primary scheme; an adaptive Simpson rule on the substituted variable is
  the fallback for integrands too steep for a global polynomial rule.
* ``upper_incomplete_gamma`` -- Gamma(a, x) for any real order ``a``
  (including the negative orders produced by service transforms), via the
  downward recurrence Gamma(a, x) = (Gamma(a+1, x) - x^a e^-x) / a.
  ``log_upper_incomplete_gamma`` is the log-space variant for orders where
  the plain value overflows.
* ``minimize_scalar`` -- coarse log-spaced grid scan followed by
  golden-section refinement, for objectives that are +inf outside their
  feasible region.

All routines are pure functions; the only module state is a cache of
Gauss-Laguerre nodes keyed by order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from scipy import special as _special

__all__ = [
    "QuadratureError",
    "NoFeasiblePointError",
    "QuadratureSpec",
    "DEFAULT_QUADRATURE",
    "integrate_exp_weighted",
    "upper_incomplete_gamma",
    "log_upper_incomplete_gamma",
    "minimize_scalar",
]

# Floor used when turning relative tolerances into absolute ones, so that
# integrals that are legitimately ~0 still converge.
_TINY = 1e-300

_SIMPSON_CUTOFF = 50.0  # exp(-50) ~ 2e-22, far below any supported tolerance
_SIMPSON_MAX_DEPTH = 48


class QuadratureError(ArithmeticError):
    """Quadrature did not converge; ``estimates`` holds the last two values."""

    def __init__(self, message: str, estimates: Tuple[float, float]):
        super().__init__(f"{message} (last two estimates: {estimates[0]!r}, {estimates[1]!r})")
        self.estimates = tuple(estimates)


class NoFeasiblePointError(ArithmeticError):
    """The minimization objective was infinite at every probed point."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Convergence policy for ``integrate_exp_weighted``.

    ``max_refinements`` counts order doublings of the Gauss-Laguerre rule
    (starting order 8), i.e. the number of successive-estimate comparisons
    made before falling back to adaptive Simpson.
    """

    relative_tolerance: float = 1e-10
    max_refinements: int = 6

    def __post_init__(self) -> None:
        if not self.relative_tolerance > 0.0:
            raise ValueError("relative_tolerance must be positive")
        if self.max_refinements < 1:
            raise ValueError("max_refinements must be at least 1")


DEFAULT_QUADRATURE = QuadratureSpec()


@lru_cache(maxsize=None)
def _laguerre_rule(order: int):
    """Gauss-Laguerre nodes/weights, or None when the construction is no
    longer numerically sound (high orders overflow in numpy's routine)."""
    with np.errstate(all="ignore"):
        nodes, weights = np.polynomial.laguerre.laggauss(order)
    if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(weights))):
        return None
    return nodes, weights


def _eval_on_nodes(f: Callable[[np.ndarray], np.ndarray], x: np.ndarray) -> np.ndarray:
    """Evaluate f on an array, falling back to a scalar loop for
    non-vectorized callables."""
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape == x.shape:
            return y
    except (TypeError, ValueError):
        pass
    return np.fromiter((float(f(v)) for v in x), dtype=float, count=x.size)


def integrate_exp_weighted(
    f: Callable[[float], float],
    mean: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Approximate ``int_0^inf f(y) (1/mean) exp(-y/mean) dy``.

    The substitution u = y/mean turns the target into
    ``int_0^inf f(mean*u) exp(-u) du``, which is evaluated with
    Gauss-Laguerre rules of doubling order until two successive estimates
    agree to ``spec.relative_tolerance``.  If doubling stalls (typical for
    very steep integrands), an adaptive Simpson rule on u in [0, 50] takes
    over.  Raises :class:`QuadratureError` if both schemes fail.
    """
    if not mean > 0.0:
        raise ValueError("mean must be positive")

    order = 8
    previous = None
    scale_hint = 0.0
    for _ in range(spec.max_refinements + 1):
        rule = _laguerre_rule(order)
        if rule is None:
            break
        nodes, weights = rule
        estimate = float(np.dot(weights, _eval_on_nodes(f, nodes * mean)))
        if math.isfinite(estimate):
            if previous is not None and abs(estimate - previous) <= spec.relative_tolerance * max(
                abs(estimate), _TINY
            ):
                return estimate
            previous = estimate
            scale_hint = estimate
        else:
            previous = None
        order *= 2

    return _adaptive_simpson(
        lambda u: float(f(mean * u)) * math.exp(-u),
        0.0,
        _SIMPSON_CUTOFF,
        spec.relative_tolerance,
        scale_hint,
    )


def _adaptive_simpson(
    g: Callable[[float], float], a: float, b: float, rtol: float, scale_hint: float = 0.0
) -> float:
    # The absolute tolerance needs the integral's true magnitude; a crude
    # whole-interval rule can miss narrow features entirely, so combine a
    # 128-panel composite estimate with whatever the primary scheme saw.
    xs = np.linspace(a, b, 257)
    gs = np.array([g(float(x)) for x in xs])
    composite = float(
        (xs[2] - xs[0]) / 6.0 * np.sum(gs[0:-2:2] + 4.0 * gs[1:-1:2] + gs[2::2])
    )
    scale = max(abs(composite), abs(scale_hint), _TINY)
    tol = rtol * scale

    ga, gm, gb = g(a), g(0.5 * (a + b)), g(b)
    whole = (b - a) / 6.0 * (ga + 4.0 * gm + gb)
    return _simpson_step(g, a, b, ga, gm, gb, whole, tol, _SIMPSON_MAX_DEPTH)


def _simpson_step(g, a, b, ga, gm, gb, s, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    glm, grm = g(lm), g(rm)
    s_left = (m - a) / 6.0 * (ga + 4.0 * glm + gm)
    s_right = (b - m) / 6.0 * (gm + 4.0 * grm + gb)
    s2 = s_left + s_right
    if abs(s2 - s) <= 15.0 * tol:
        return s2 + (s2 - s) / 15.0
    if depth <= 0:
        raise QuadratureError("quadrature did not converge", (s, s2))
    return _simpson_step(g, a, m, ga, glm, gm, s_left, 0.5 * tol, depth - 1) + _simpson_step(
        g, m, b, gm, grm, gb, s_right, 0.5 * tol, depth - 1
    )


def upper_incomplete_gamma(a: float, x: float) -> float:
    """Gamma(a, x) = int_x^inf t^(a-1) e^-t dt for x > 0 and any real a.

    For a <= 0 the value is reconstructed from the positive-order base case
    through the downward recurrence; it is strictly positive for x > 0, so
    the computation runs in log space and may overflow to +inf for very
    negative orders at small x.
    """
    try:
        return math.exp(log_upper_incomplete_gamma(a, x))
    except OverflowError:
        return math.inf


def log_upper_incomplete_gamma(a: float, x: float) -> float:
    """log Gamma(a, x); see :func:`upper_incomplete_gamma`.

    Near non-positive integer orders the recurrence divides by ~0 and loses
    all precision; callers probing such orders should treat +inf results as
    "not evaluable here".
    """
    if not x > 0.0:
        raise ValueError("x must be positive")
    if a > 0.0:
        regularized = float(_special.gammaincc(a, x))
        if regularized > 0.0:
            return math.log(regularized) + float(_special.gammaln(a))
        # Regularized value underflowed (x >> a): two-term large-x asymptotic.
        return (a - 1.0) * math.log(x) - x + math.log1p((a - 1.0) / x)

    steps = int(math.ceil(-a))
    start = a + steps  # in [0, 1)
    if start == 0.0:
        log_gamma = math.log(float(_special.exp1(x)))
    else:
        log_gamma = log_upper_incomplete_gamma(start, x)

    log_x = math.log(x)
    b = start
    for _ in range(steps):
        b -= 1.0
        # Gamma(b, x) = (x^b e^-x - Gamma(b+1, x)) / (-b), all in logs.
        leading = b * log_x - x
        diff = log_gamma - leading
        if diff >= 0.0:
            # Cancellation exhausted double precision (order ~ a pole).
            return math.inf
        log_gamma = leading + math.log1p(-math.exp(diff)) - math.log(-b)
    return log_gamma


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def minimize_scalar(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-9,
    grid_points: int = 128,
) -> Tuple[float, float]:
    """Minimize f over the open interval (lo, hi).

    A log-spaced grid scan locates the best cell, then golden-section
    search refines inside it.  ``tol`` is the termination width of the
    bracket measured in log-argument units (the useful argument range
    spans several decades).  The objective may return +inf (or nan,
    treated as +inf) wherever it is undefined; if that happens on the
    whole grid, :class:`NoFeasiblePointError` is raised.

    Returns ``(argmin, min_value)`` -- never worse than the best point
    actually evaluated.
    """
    if not (0.0 < lo < hi):
        raise ValueError("need 0 < lo < hi")
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    if grid_points < 64:
        raise ValueError("grid_points must be at least 64")

    best_x = math.nan
    best_f = math.inf

    def probe(x: float) -> float:
        nonlocal best_x, best_f
        v = f(x)
        if v != v:  # nan -> infeasible
            v = math.inf
        if v < best_f:
            best_x, best_f = x, v
        return v

    grid = np.geomspace(lo, hi, grid_points + 2)[1:-1]
    values = [probe(float(x)) for x in grid]
    if not math.isfinite(best_f):
        raise NoFeasiblePointError("objective is infinite at every grid point")

    i = int(np.argmin(values))
    t_lo = math.log(float(grid[max(i - 1, 0)]))
    t_hi = math.log(float(grid[min(i + 1, len(grid) - 1)]))

    c = t_hi - _INV_PHI * (t_hi - t_lo)
    d = t_lo + _INV_PHI * (t_hi - t_lo)
    fc = probe(math.exp(c))
    fd = probe(math.exp(d))
    while t_hi - t_lo > tol:
        if fc < fd:
            t_hi, d, fd = d, c, fc
            c = t_hi - _INV_PHI * (t_hi - t_lo)
            fc = probe(math.exp(c))
        else:
            t_lo, c, fc = c, d, fd
            d = t_lo + _INV_PHI * (t_hi - t_lo)
            fd = probe(math.exp(d))

    return best_x, best_f
