"""Optimization and scanning: maximize the chained CHSH over the angle step,
locate the minimal frame size per system spin, fit the resulting boundary,
and evaluate the Gaussian pointer heuristic."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .angular import HalfInt, check_spin
from .bell import VIOLATION_EPS, chained_chsh_parity
from .correlations import FrameSize
from .errors import DegenerateDesign

__all__ = [
    "ScanRecord",
    "FitResult",
    "NotFoundBelowCap",
    "maximize_chained_chsh",
    "minimal_rf_scan",
    "quadratic_fit",
    "heuristic_bound",
    "heuristic_ok",
]

log = logging.getLogger(__name__)

# Large-spin optimum of the equal-spacing chained expression sits near
# delta_theta = CLASSICAL_ANGLE_COEFF / (2 j_s + 1); the search window spans
# eight times that, capped at pi/3 so the triple angle stays within [0, pi].
CLASSICAL_ANGLE_COEFF = 1.054

_COARSE_POINTS = 64
_ANGLE_TOL = 1e-6
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ScanRecord:
    """One row of the minimal-frame boundary scan."""

    two_j_s: int
    two_j_rf_min: int
    delta_theta_opt: float
    s_max: float


@dataclass(frozen=True)
class FitResult:
    """Zero-intercept quadratic fit a*j^2 + b*j with a cubic diagnostic."""

    a: float
    b: float
    rms_residual: float
    cubic_coeff: float | None = None


class NotFoundBelowCap(Exception):
    """No violating frame size at or below the scan cap."""

    def __init__(self, two_j_s: int, two_j_rf_cap: int, best_s: float) -> None:
        super().__init__(
            f"no violation for 2j_s={two_j_s} up to 2j_rf={two_j_rf_cap}"
            f" (best S = {best_s:.6f})")
        self.two_j_s = two_j_s
        self.two_j_rf_cap = two_j_rf_cap
        self.best_s = best_s


def _golden_max(f: Callable[[float], float], lo: float, hi: float,
                tol: float) -> tuple[float, float]:
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def maximize_chained_chsh(j_s: HalfInt, j_rf: FrameSize) -> tuple[float, float]:
    """Best (delta_theta, S) of the chained CHSH over the angle step.

    Coarse grid of 64 points on (0, min(pi/3, 8 * 1.054 / (2 j_s + 1))],
    then golden-section refinement to 1e-6 in the angle.
    """
    check_spin(j_s, "j_s")
    hi = min(math.pi / 3.0,
             8.0 * CLASSICAL_ANGLE_COEFF / (2.0 * j_s.value + 1.0))

    def f(x: float) -> float:
        return chained_chsh_parity(j_s, j_rf, x).value

    xs = [hi * k / _COARSE_POINTS for k in range(1, _COARSE_POINTS + 1)]
    vals = [f(x) for x in xs]
    k = max(range(len(xs)), key=vals.__getitem__)
    lo_b = xs[k - 1] if k > 0 else 0.5 * xs[0]
    hi_b = xs[k + 1] if k + 1 < len(xs) else hi
    x, s = _golden_max(f, lo_b, hi_b, _ANGLE_TOL)
    if vals[k] > s:
        return xs[k], vals[k]
    return x, s


def minimal_rf_scan(j_s: HalfInt, j_rf_cap: HalfInt) -> ScanRecord:
    """Smallest half-integer frame spin at or below the cap whose optimized
    chained CHSH exceeds 2.

    Exponential stepping over j_rf = 2 j_s, 4 j_s, ... brackets the boundary,
    half-integer bisection closes it, and both boundary sides are re-evaluated
    so a monotonicity failure surfaces instead of passing silently.  Raises
    NotFoundBelowCap (carrying the best S reached) when the cap is too low.
    """
    check_spin(j_s, "j_s")
    check_spin(j_rf_cap, "j_rf_cap")
    if j_s.twice < 1:
        raise ValueError("scan needs j_s >= 1/2")
    tcap = j_rf_cap.twice
    best_s = 0.0
    lo_t = 0                      # largest known non-violating 2*j_rf
    hi_t: int | None = None       # smallest known violating 2*j_rf
    t = 2 * j_s.twice
    while True:
        t_eval = min(t, tcap)
        _, s = maximize_chained_chsh(j_s, HalfInt(t_eval))
        best_s = max(best_s, s)
        if s > 2.0 + VIOLATION_EPS:
            hi_t = t_eval
            break
        lo_t = t_eval
        if t_eval >= tcap:
            raise NotFoundBelowCap(j_s.twice, tcap, best_s)
        t *= 2
    while hi_t - lo_t > 1:
        mid = (lo_t + hi_t) // 2
        _, s = maximize_chained_chsh(j_s, HalfInt(mid))
        best_s = max(best_s, s)
        if s > 2.0 + VIOLATION_EPS:
            hi_t = mid
        else:
            lo_t = mid
    dt_min, s_min = maximize_chained_chsh(j_s, HalfInt(hi_t))
    if not s_min > 2.0 + VIOLATION_EPS:
        raise RuntimeError(
            f"boundary check failed: S({hi_t}/2) = {s_min} does not violate")
    if hi_t > 1:
        _, s_below = maximize_chained_chsh(j_s, HalfInt(hi_t - 1))
        if s_below > 2.0 + VIOLATION_EPS:
            raise RuntimeError(
                f"violation is not monotone near the boundary: "
                f"S({(hi_t - 1)}/2) = {s_below} > 2")
    log.info("scan row 2j_s=%d: 2j_rf_min=%d S=%.9f dtheta=%.9f",
             j_s.twice, hi_t, s_min, dt_min)
    return ScanRecord(two_j_s=j_s.twice, two_j_rf_min=hi_t,
                      delta_theta_opt=dt_min, s_max=s_min)


def quadratic_fit(records: Sequence[ScanRecord]) -> FitResult:
    """Least-squares fit of the boundary to a*j_s^2 + b*j_s (no intercept),
    solved from the 2x2 normal equations; a cubic refit supplies the
    leading-coefficient diagnostic when three distinct abscissae exist."""
    xs = np.array([r.two_j_s / 2.0 for r in records])
    ys = np.array([r.two_j_rf_min / 2.0 for r in records])
    distinct = len(set(r.two_j_s for r in records))
    if distinct < 2:
        raise DegenerateDesign(
            f"need at least 2 distinct j_s values, got {distinct}")
    x2 = xs * xs
    s22 = float(x2 @ x2)
    s21 = float(x2 @ xs)
    s11 = float(xs @ xs)
    det = s22 * s11 - s21 * s21
    r2 = float(x2 @ ys)
    r1 = float(xs @ ys)
    a = (r2 * s11 - r1 * s21) / det
    b = (s22 * r1 - s21 * r2) / det
    resid = ys - a * x2 - b * xs
    rms = float(np.sqrt(np.mean(resid * resid)))
    cubic = None
    if distinct >= 3:
        design = np.column_stack([xs ** 3, x2, xs])
        coeffs, *_ = np.linalg.lstsq(design, ys, rcond=None)
        cubic = float(coeffs[0])
    return FitResult(a=a, b=b, rms_residual=rms, cubic_coeff=cubic)


def heuristic_bound(j_rf: HalfInt, theta: float) -> tuple[float, float]:
    """Gaussian pointer width of the frame's z-projection and the resulting
    angular resolution: sigma = sqrt(j_rf sin^2(theta) / 2), uncertainty
    1/sigma.  (Binomial variance of the coherent-state projection.)"""
    check_spin(j_rf, "j_rf")
    if j_rf.twice == 0:
        raise ValueError("heuristic needs j_rf > 0")
    if not 0.0 < theta < math.pi:
        raise ValueError(f"theta must lie in (0, pi), got {theta}")
    sigma = math.sqrt(0.5 * j_rf.value * math.sin(theta) ** 2)
    return sigma, 1.0 / sigma


def heuristic_ok(j_rf: HalfInt, j_s: HalfInt) -> bool:
    """Resolution heuristic j_rf > j_s^2 for resolving the Bell angles."""
    check_spin(j_rf, "j_rf")
    check_spin(j_s, "j_s")
    return j_rf.value > j_s.value ** 2
