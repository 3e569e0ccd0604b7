"""Bell-expression evaluation and violation thresholds: CHSH for a bounded
pair, Mermin (exact, asymptotic, mixed frame sizes), and the equal-spacing
chained CHSH for parity measurements."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .angular import HalfInt, check_spin
from .correlations import (
    UNBOUNDED,
    FrameSize,
    mermin_correlation_numeric,
    parity_correlation,
)
from .errors import NoThresholdExists
from .states import Direction

__all__ = [
    "VIOLATION_EPS",
    "BellResult",
    "MixedFrameSpec",
    "chsh_pair",
    "chsh_min_partner",
    "mermin_value",
    "mermin_value_numeric",
    "mermin_asymptotic_factor",
    "mermin_mixed_violates",
    "mermin_min_ratio",
    "chained_chsh_parity",
]

# Numerical dust margin: "violated" means value > bound + VIOLATION_EPS.
VIOLATION_EPS = 1e-9

# Boundary ties of the log-space mixed-frame inequality resolve to False.
_LOG_TIE_TOL = 1e-12

_SQRT2 = math.sqrt(2.0)

SETTING_X = Direction(math.pi / 2, 0.0)
SETTING_Y = Direction(math.pi / 2, math.pi / 2)


@dataclass(frozen=True)
class BellResult:
    value: float
    bound: float
    violated: bool
    settings: tuple[float, ...]


def _result(value: float, bound: float, settings: tuple[float, ...]) -> BellResult:
    return BellResult(value=value, bound=bound,
                      violated=value > bound + VIOLATION_EPS, settings=settings)


@dataclass(frozen=True)
class MixedFrameSpec:
    """N1 frames of size j1 plus N2 frames of size j2 (j2 may be UNBOUNDED)."""

    n1: int
    j1: HalfInt
    n2: int
    j2: FrameSize

    def __post_init__(self) -> None:
        if self.n1 < 0 or self.n2 < 0 or self.n1 + self.n2 < 1:
            raise ValueError("need n1, n2 >= 0 and at least one party")


def chsh_pair(j1: HalfInt, j2: HalfInt) -> BellResult:
    """CHSH value 2|1 + 4 sqrt(2) j1 j2| / ((2 j1 + 1)(2 j2 + 1)) at the
    optimal settings: relative angle 3 pi/4 for three pairs, pi/4 for the
    fourth."""
    check_spin(j1, "j1")
    check_spin(j2, "j2")
    v1, v2 = j1.value, j2.value
    value = 2.0 * abs(1.0 + 4.0 * _SQRT2 * v1 * v2) / ((2 * v1 + 1) * (2 * v2 + 1))
    angles = (0.75 * math.pi, 0.75 * math.pi, 0.75 * math.pi, 0.25 * math.pi)
    return _result(value, 2.0, angles)


def chsh_min_partner(j2: FrameSize) -> HalfInt | None:
    """Smallest half-integer j1 that pairs with j2 to violate CHSH, or None
    when no finite j1 can (threshold j1 > j2 / (2 (sqrt(2) - 1) j2 - 1))."""
    if j2 is UNBOUNDED:
        threshold = 1.0 / (2.0 * (_SQRT2 - 1.0))
    else:
        check_spin(j2, "j2")
        denom = 2.0 * (_SQRT2 - 1.0) * j2.value - 1.0
        if denom <= 0.0:
            return None
        threshold = j2.value / denom
    t2 = 2.0 * threshold
    if abs(t2 - round(t2)) < 1e-9:
        return HalfInt(int(round(t2)) + 1)
    return HalfInt(math.floor(t2) + 1)


def mermin_value(n: int, frames: Sequence[HalfInt]) -> BellResult:
    """Mermin expression for finite frames at the X/Y settings:
    |sqrt(2) cos(n pi/4) + 2^(n-1) prod 2 j_k| / prod (2 j_k + 1),
    against the local bound 2^((n-1)/2)."""
    if n != len(frames):
        raise ValueError(f"n = {n} but {len(frames)} frames given")
    if n < 1:
        raise ValueError("need at least one party")
    prod2j = 1.0
    denom = 1.0
    for j in frames:
        check_spin(j)
        prod2j *= 2.0 * j.value
        denom *= 2.0 * j.value + 1.0
    value = abs(_SQRT2 * math.cos(n * math.pi / 4.0) + 2.0 ** (n - 1) * prod2j) / denom
    bound = 2.0 ** ((n - 1) / 2.0)
    settings = (SETTING_X.theta, SETTING_X.phi, SETTING_Y.theta, SETTING_Y.phi)
    return _result(value, bound, settings)


def mermin_value_numeric(frames: Sequence[FrameSize]) -> BellResult:
    """Mermin expression assembled from the numeric GHZ correlations at the
    X/Y settings; supports UNBOUNDED entries.

    At these settings the correlation depends only on how many parties
    measure Y, so the 2^N setting strings group by that count.
    """
    n = len(frames)
    if n < 1:
        raise ValueError("need at least one party")
    total = 0.0
    for k in range(n + 1):
        weight = math.cos(0.5 * math.pi * k)
        if abs(weight) < 1e-15:
            continue
        settings = [SETTING_Y] * k + [SETTING_X] * (n - k)
        total += math.comb(n, k) * weight * mermin_correlation_numeric(settings, frames)
    bound = 2.0 ** ((n - 1) / 2.0)
    sett = (SETTING_X.theta, SETTING_X.phi, SETTING_Y.theta, SETTING_Y.phi)
    return _result(abs(total), bound, sett)


def mermin_asymptotic_factor(j: FrameSize) -> float:
    """Per-party large-N gain sqrt(2) j / (j + 1/2); > 1 sustains violation."""
    if j is UNBOUNDED:
        return _SQRT2
    check_spin(j)
    if j.twice == 0:
        return 0.0
    return _SQRT2 * j.value / (j.value + 0.5)


def mermin_mixed_violates(spec: MixedFrameSpec) -> bool:
    """Large-N violation condition for the mixed frame population,
    factor(j1)^N1 * factor(j2)^N2 > sqrt(2), evaluated in log space."""
    f1 = mermin_asymptotic_factor(spec.j1)
    f2 = mermin_asymptotic_factor(spec.j2)
    if (f1 == 0.0 and spec.n1 > 0) or (f2 == 0.0 and spec.n2 > 0):
        return False
    log_lhs = spec.n1 * math.log(f1) if spec.n1 else 0.0
    log_lhs += spec.n2 * math.log(f2) if spec.n2 else 0.0
    return log_lhs - 0.5 * math.log(2.0) > _LOG_TIE_TOL


def mermin_min_ratio(j1: HalfInt, j2: HalfInt) -> float:
    """Asymptotic minimal fraction N1/N of j1-frames needed for violation
    when mixed with j2-frames: the root of r ln f1 + (1 - r) ln f2 = 0."""
    f1 = mermin_asymptotic_factor(j1)
    f2 = mermin_asymptotic_factor(j2)
    if not f1 > 1.0 or not f2 < 1.0:
        raise NoThresholdExists(
            f"need factor(j1) > 1 > factor(j2); got {f1:.6f}, {f2:.6f}")
    if f2 == 0.0:
        return 0.0
    l1, l2 = math.log(f1), math.log(f2)
    return -l2 / (l1 - l2)


def chained_chsh_parity(j_s: HalfInt, j_rf: FrameSize, delta_theta: float) -> BellResult:
    """Equal-spacing chained CHSH |3 E(dt) - E(3 dt)| for parity measurements
    on the generalized singlet, local bound 2."""
    if not 0.0 <= delta_theta <= math.pi / 3.0:
        raise ValueError(f"delta_theta must lie in [0, pi/3], got {delta_theta}")
    e1 = parity_correlation(j_s, j_rf, delta_theta)
    e3 = parity_correlation(j_s, j_rf, 3.0 * delta_theta)
    return _result(abs(3.0 * e1 - e3), 2.0, (delta_theta, 3.0 * delta_theta))
