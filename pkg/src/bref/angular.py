"""Angular-momentum kernels: half-integer spins, log-factorials, Clebsch-Gordan
coefficients, and Wigner small-d rotation matrices.

Clebsch-Gordan coefficients come in two independent evaluators.  ``cg_racah``
computes the Racah single-sum formula in exact integer arithmetic (Python
bignums), which stays correct at any spin but slows down for very large ones.
``cg_recurrence`` walks a three-term recurrence over the first magnetic
quantum number, seeded at both ends of the allowed range where the Racah sum
collapses to a single term; it is fast and stable for the large frame spins
the scans need.  ``clebsch_gordan`` dispatches between them by size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import InvalidSpin

__all__ = [
    "HalfInt",
    "CgArgs",
    "ln_factorial",
    "clebsch_gordan",
    "cg_racah",
    "cg_recurrence",
    "cg_family",
    "wigner_small_d",
    "wigner_small_d_matrix",
    "RACAH_MAX_TWO_J",
]

# Largest max(2j1, 2j2, 2j) routed to the exact Racah sum by clebsch_gordan.
RACAH_MAX_TWO_J = 60

# Largest 2j for which the small-d matrix uses the direct sign-alternating sum;
# above this the matrix is built from the eigendecomposition of the generator.
_DIRECT_D_MAX_TWO_J = 40


@dataclass(frozen=True, order=True)
class HalfInt:
    """Exact half-integer, stored as twice its value.

    Comparisons and arithmetic stay in integers, so selection rules and grid
    steps are exact.  Use ``HalfInt.of`` to build one from ``3``, ``2.5`` or
    ``"5/2"``.
    """

    twice: int

    def __post_init__(self) -> None:
        if not isinstance(self.twice, int):
            raise InvalidSpin(f"twice-value must be an integer, got {self.twice!r}")

    @classmethod
    def of(cls, x: "HalfInt | int | float | str") -> "HalfInt":
        if isinstance(x, HalfInt):
            return x
        if isinstance(x, int):
            return cls(2 * x)
        if isinstance(x, float):
            t = 2 * x
            if t != round(t):
                raise InvalidSpin(f"{x!r} is not a half-integer")
            return cls(int(round(t)))
        if isinstance(x, str):
            s = x.strip()
            try:
                if "/" in s:
                    num, den = s.split("/", 1)
                    f = Fraction(int(num), int(den))
                else:
                    f = Fraction(s)
            except (ValueError, ZeroDivisionError) as exc:
                raise InvalidSpin(f"{x!r} is not a half-integer") from exc
            if f.denominator not in (1, 2):
                raise InvalidSpin(f"{x!r} is not a half-integer")
            return cls(int(f * 2))
        raise InvalidSpin(f"cannot interpret {x!r} as a half-integer")

    @property
    def value(self) -> float:
        return self.twice / 2.0

    @property
    def is_integral(self) -> bool:
        return self.twice % 2 == 0

    def is_physical_spin(self) -> bool:
        return self.twice >= 0

    def __float__(self) -> float:
        return self.twice / 2.0

    def __add__(self, other: "HalfInt") -> "HalfInt":
        return HalfInt(self.twice + other.twice)

    def __sub__(self, other: "HalfInt") -> "HalfInt":
        return HalfInt(self.twice - other.twice)

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __str__(self) -> str:
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"


def check_spin(j: HalfInt, name: str = "j") -> HalfInt:
    if j.twice < 0:
        raise InvalidSpin(f"{name} must be non-negative, got {j}")
    return j


@dataclass(frozen=True)
class CgArgs:
    """Arguments of a Clebsch-Gordan coefficient <j,m|j1,m1;j2,m2>."""

    j1: HalfInt
    m1: HalfInt
    j2: HalfInt
    m2: HalfInt
    j: HalfInt
    m: HalfInt

    def selection_rules_ok(self) -> bool:
        tj1, tm1, tj2, tm2, tj, tm = (
            self.j1.twice, self.m1.twice, self.j2.twice,
            self.m2.twice, self.j.twice, self.m.twice,
        )
        return (
            tm1 + tm2 == tm
            and abs(tm1) <= tj1
            and abs(tm2) <= tj2
            and abs(tm) <= tj
            and abs(tj1 - tj2) <= tj <= tj1 + tj2
            and (tj1 + tj2 + tj) % 2 == 0
            and (tj1 + tm1) % 2 == 0
            and (tj2 + tm2) % 2 == 0
        )


_LN_FACT: list[float] = [0.0]


def ln_factorial(n: int) -> float:
    """ln(n!) via a lazily grown memo table."""
    if n < 0:
        raise ValueError(f"ln_factorial of negative {n}")
    while len(_LN_FACT) <= n:
        _LN_FACT.append(math.lgamma(len(_LN_FACT) + 1.0))
    return _LN_FACT[n]


def _sqrt_fraction(fr: Fraction) -> float:
    """sqrt of a non-negative Fraction, scaled to dodge float under/overflow."""
    num, den = fr.numerator, fr.denominator
    if num == 0:
        return 0.0
    k = (num.bit_length() - den.bit_length()) // 2
    if k >= 0:
        scaled = Fraction(num, den << (2 * k))
    else:
        scaled = Fraction(num << (-2 * k), den)
    return math.ldexp(math.sqrt(float(scaled)), k)


def _cg_selection_ok(tj1: int, tm1: int, tj2: int, tm2: int, tj: int, tm: int) -> bool:
    return (
        tm1 + tm2 == tm
        and abs(tm1) <= tj1
        and abs(tm2) <= tj2
        and abs(tm) <= tj
        and abs(tj1 - tj2) <= tj <= tj1 + tj2
        and (tj1 + tj2 + tj) % 2 == 0
        and (tj1 + tm1) % 2 == 0
        and (tj2 + tm2) % 2 == 0
    )


def _cg_racah_twice(tj1: int, tm1: int, tj2: int, tm2: int, tj: int, tm: int) -> float:
    if not _cg_selection_ok(tj1, tm1, tj2, tm2, tj, tm):
        return 0.0
    fact = math.factorial
    a = (tj1 + tj2 - tj) // 2
    e = (tj1 - tm1) // 2
    f = (tj2 + tm2) // 2
    kmin = max(0, (tj2 - tj - tm1) // 2, (tj1 + tm2 - tj) // 2)
    kmax = min(a, e, f)
    if kmax < kmin:
        return 0.0
    s = Fraction(0)
    for k in range(kmin, kmax + 1):
        den = (
            fact(k) * fact(a - k) * fact(e - k) * fact(f - k)
            * fact((tj - tj2 + tm1) // 2 + k) * fact((tj - tj1 - tm2) // 2 + k)
        )
        s += Fraction(-1 if k % 2 else 1, den)
    if s == 0:
        return 0.0
    pref2 = Fraction(
        (tj + 1) * fact(a) * fact((tj1 - tj2 + tj) // 2) * fact((tj2 - tj1 + tj) // 2),
        fact((tj1 + tj2 + tj) // 2 + 1),
    )
    pref2 *= (
        fact((tj1 + tm1) // 2) * fact(e) * fact(f) * fact((tj2 - tm2) // 2)
        * fact((tj + tm) // 2) * fact((tj - tm) // 2)
    )
    val = _sqrt_fraction(pref2 * s * s)
    return val if s > 0 else -val


def _boundary_sign(tj1: int, tm1: int, tj2: int, tj: int, tm: int) -> float:
    # At the ends of the m1 range the Racah sum has a single term (-1)^kmin.
    tm2 = tm - tm1
    kmin = max(0, (tj2 - tj - tm1) // 2, (tj1 + tm2 - tj) // 2)
    return -1.0 if kmin % 2 else 1.0


@lru_cache(maxsize=None)
def cg_family(tj1: int, tj2: int, tj: int, tm: int) -> tuple[int, np.ndarray]:
    """All coefficients <j,m|j1,m1;j2,m-m1> over the valid m1 range.

    Returns ``(t_lo, values)`` where ``t_lo`` is twice the smallest valid m1
    and ``values[i]`` belongs to twice-m1 ``t_lo + 2*i``.  Evaluated with the
    normalized three-term recurrence: exact-sign seeds at both ends of the
    range, forward and backward passes stitched at a point where both are in
    the oscillatory (classically allowed) region, then unit normalization.
    """
    if (
        (tj1 + tj2 + tj) % 2
        or not abs(tj1 - tj2) <= tj <= tj1 + tj2
        or abs(tm) > tj
        or (tj + tm) % 2
    ):
        return 0, np.empty(0)
    tlo = max(-tj1, tm - tj2)
    thi = min(tj1, tm + tj2)
    n = (thi - tlo) // 2 + 1
    if n == 1:
        return tlo, np.array([_cg_racah_twice(tj1, tlo, tj2, tm - tlo, tj, tm)])

    j1 = tj1 / 2.0
    j2 = tj2 / 2.0
    jj = tj / 2.0
    mm = tm / 2.0
    jj_term = j1 * (j1 + 1) + j2 * (j2 + 1) - jj * (jj + 1)

    def coeffs(tm1: int) -> tuple[float, float, float]:
        m1 = tm1 / 2.0
        m2 = mm - m1
        x = math.sqrt((j1 - m1) * (j1 + m1 + 1) * (j2 + m2) * (j2 - m2 + 1))
        y = 2.0 * m1 * m2 + jj_term
        z = math.sqrt((j1 + m1) * (j1 - m1 + 1) * (j2 - m2) * (j2 + m2 + 1))
        return x, y, z

    def fwd_step(vec: list[float], i: int) -> None:
        x, y, z = coeffs(tlo + 2 * (i - 1))
        prev2 = vec[i - 2] if i >= 2 else 0.0
        vec[i] = -(y * vec[i - 1] + z * prev2) / x
        if abs(vec[i]) > 1e250:
            for t in range(i + 1):
                vec[t] *= 1e-250

    def bwd_step(vec: list[float], i: int) -> None:
        x, y, z = coeffs(tlo + 2 * (i + 1))
        nxt2 = vec[i + 2] if i + 2 < n else 0.0
        vec[i] = -(y * vec[i + 1] + x * nxt2) / z
        if abs(vec[i]) > 1e250:
            for t in range(i, n):
                vec[t] *= 1e-250

    # March each pass from its exact-sign seed until its magnitude first
    # stops growing (the classically allowed, oscillatory zone begins there);
    # past the far turning point a pass would blow up, so never go there.
    fwd = [0.0] * n
    fwd[0] = _boundary_sign(tj1, tlo, tj2, tj, tm)
    s_f = n - 1
    for i in range(1, n):
        fwd_step(fwd, i)
        if abs(fwd[i]) <= abs(fwd[i - 1]):
            s_f = i
            break
    if s_f >= n - 1:
        # magnitude grows to the upper end: the forward pass alone is reliable
        vals = np.array(fwd)
        vals /= np.max(np.abs(vals))
        vals /= math.sqrt(float(vals @ vals))
        return tlo, vals

    bwd = [0.0] * n
    bwd[n - 1] = _boundary_sign(tj1, thi, tj2, tj, tm)
    s_b = 0
    for i in range(n - 2, -1, -1):
        bwd_step(bwd, i)
        if abs(bwd[i]) <= abs(bwd[i + 1]):
            s_b = i
            break
    if s_b <= 0:
        vals = np.array(bwd)
        vals /= np.max(np.abs(vals))
        vals /= math.sqrt(float(vals @ vals))
        return tlo, vals

    # Extend both passes across the matching window between the onsets; both
    # stay inside their stable zones there.
    wlo, whi = min(s_f, s_b), max(s_f, s_b)
    for i in range(s_f + 1, whi + 1):
        fwd_step(fwd, i)
    for i in range(s_b - 1, wlo - 1, -1):
        bwd_step(bwd, i)

    # Stitch where both passes carry signal relative to their own scale (the
    # internal scales can differ by hundreds of orders, so never compare the
    # passes directly); widen around true zeros of the solution.
    window = list(range(wlo, whi + 1))
    while True:
        mf = max(abs(fwd[t]) for t in window)
        mb = max(abs(bwd[t]) for t in window)
        if mf > 0.0 and mb > 0.0:
            ks = max(window,
                     key=lambda t: min(abs(fwd[t]) / mf, abs(bwd[t]) / mb))
            if fwd[ks] != 0.0 and bwd[ks] != 0.0:
                break
        lo_next = max(window[0] - 1, 0)
        hi_next = min(window[-1] + 1, n - 1)
        if lo_next == window[0] and hi_next == window[-1]:
            raise FloatingPointError(
                f"no usable stitch point for CG family "
                f"({tj1}, {tj2}, {tj}, {tm})")
        window = list(range(lo_next, hi_next + 1))
        if window[-1] > whi:
            for i in range(whi + 1, window[-1] + 1):
                fwd_step(fwd, i)
            whi = window[-1]
        if window[0] < wlo:
            for i in range(wlo - 1, window[0] - 1, -1):
                bwd_step(bwd, i)
            wlo = window[0]

    sf_ks = abs(fwd[ks])
    sb_ks = abs(bwd[ks])
    vals = np.array([f / sf_ks for f in fwd[: ks + 1]]
                    + [b / sb_ks for b in bwd[ks + 1 :]])
    vals /= np.max(np.abs(vals))
    vals /= math.sqrt(float(vals @ vals))
    return tlo, vals


def _validate_cg_spins(args: CgArgs) -> None:
    for name in ("j1", "j2", "j"):
        j: HalfInt = getattr(args, name)
        if j.twice < 0:
            raise InvalidSpin(f"{name} must be non-negative, got {j}")


def cg_racah(args: CgArgs) -> float:
    """Racah-sum evaluation (exact arithmetic); 0 when selection rules fail."""
    _validate_cg_spins(args)
    return _cg_racah_twice(
        args.j1.twice, args.m1.twice, args.j2.twice,
        args.m2.twice, args.j.twice, args.m.twice,
    )


def cg_recurrence(args: CgArgs) -> float:
    """Recurrence-family evaluation; 0 when selection rules fail."""
    _validate_cg_spins(args)
    if not args.selection_rules_ok():
        return 0.0
    tlo, vals = cg_family(args.j1.twice, args.j2.twice, args.j.twice, args.m.twice)
    idx = (args.m1.twice - tlo) // 2
    if vals.size == 0 or not 0 <= idx < vals.size:
        return 0.0
    return float(vals[idx])


def clebsch_gordan(args: CgArgs) -> float:
    """Condon-Shortley Clebsch-Gordan coefficient, dispatched by size."""
    _validate_cg_spins(args)
    if not args.selection_rules_ok():
        return 0.0
    if max(args.j1.twice, args.j2.twice, args.j.twice) <= RACAH_MAX_TWO_J:
        return _cg_racah_twice(
            args.j1.twice, args.m1.twice, args.j2.twice,
            args.m2.twice, args.j.twice, args.m.twice,
        )
    return cg_recurrence(args)


def _d_element_direct(tj: int, tmr: int, tmc: int, theta: float) -> float:
    """Sign-alternating sum for d^j_{mr,mc}(theta); exact compensated total."""
    half = 0.5 * theta
    c, s = math.cos(half), math.sin(half)
    smin = max(0, (tmc - tmr) // 2)
    smax = min((tj + tmc) // 2, (tj - tmr) // 2)
    if smax < smin:
        return 0.0
    lnpref = 0.5 * (
        ln_factorial((tj + tmr) // 2) + ln_factorial((tj - tmr) // 2)
        + ln_factorial((tj + tmc) // 2) + ln_factorial((tj - tmc) // 2)
    )
    terms = []
    for k in range(smin, smax + 1):
        pc = (tj + tmc) // 2 - k + (tj - tmr) // 2 - k   # power of cos(theta/2)
        ps = (tmr - tmc) // 2 + 2 * k                    # power of sin(theta/2)
        if (c == 0.0 and pc > 0) or (s == 0.0 and ps > 0):
            continue
        ln = (
            lnpref
            - ln_factorial((tj + tmc) // 2 - k) - ln_factorial(k)
            - ln_factorial((tmr - tmc) // 2 + k) - ln_factorial((tj - tmr) // 2 - k)
            + (pc * math.log(abs(c)) if pc else 0.0)
            + (ps * math.log(abs(s)) if ps else 0.0)
        )
        neg = ((tmr - tmc) // 2 + k) % 2
        if c < 0.0 and pc % 2:
            neg ^= 1
        if s < 0.0 and ps % 2:
            neg ^= 1
        terms.append(-math.exp(ln) if neg else math.exp(ln))
    return math.fsum(terms)


@lru_cache(maxsize=None)
def _jy_eigensystem(tj: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvectors of the y-generator in the descending-m basis.

    Eigenvalues are snapped to the exact half-integers m = j..-j.
    """
    dim = tj + 1
    j = tj / 2.0
    jy = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        m = j - i
        if i - 1 >= 0:
            jy[i - 1, i] += math.sqrt((j - m) * (j + m + 1)) / 2j
        if i + 1 < dim:
            jy[i + 1, i] -= math.sqrt((j + m) * (j - m + 1)) / 2j
    eigvals, eigvecs = np.linalg.eigh(jy)
    snapped = np.round(2 * eigvals) / 2.0
    return snapped, eigvecs


def _d_matrix_eig(tj: int, theta: float) -> np.ndarray:
    eigvals, v = _jy_eigensystem(tj)
    phases = np.exp(-1j * theta * eigvals)
    return np.real((v * phases) @ v.conj().T)


def wigner_small_d_matrix(j: HalfInt, theta: float) -> np.ndarray:
    """Full (2j+1)x(2j+1) rotation matrix d^j(theta), rows/cols m = j..-j."""
    check_spin(j)
    tj = j.twice
    if tj <= _DIRECT_D_MAX_TWO_J:
        dim = tj + 1
        out = np.empty((dim, dim))
        for r in range(dim):
            for c in range(dim):
                out[r, c] = _d_element_direct(tj, tj - 2 * r, tj - 2 * c, theta)
        return out
    return _d_matrix_eig(tj, theta)


def wigner_small_d(j: HalfInt, m_row: HalfInt, m_col: HalfInt, theta: float) -> float:
    """Single rotation matrix element d^j_{m_row,m_col}(theta)."""
    check_spin(j)
    if abs(m_row.twice) > j.twice or abs(m_col.twice) > j.twice:
        raise InvalidSpin(f"|m| exceeds j={j}")
    if (j.twice + m_row.twice) % 2 or (j.twice + m_col.twice) % 2:
        raise InvalidSpin("m must differ from j by an integer")
    tj = j.twice
    if tj <= _DIRECT_D_MAX_TWO_J:
        return _d_element_direct(tj, m_row.twice, m_col.twice, theta)
    mat = _d_matrix_eig(tj, theta)
    return float(mat[(tj - m_row.twice) // 2, (tj - m_col.twice) // 2])
