"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines and timings.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from bref.angular import CgArgs, HalfInt, cg_family, cg_racah, cg_recurrence, clebsch_gordan
from bref.bell import (
    chsh_pair,
    mermin_asymptotic_factor,
    mermin_min_ratio,
    mermin_mixed_violates,
    mermin_value,
    mermin_value_numeric,
    MixedFrameSpec,
)
from bref.correlations import (
    UNBOUNDED,
    mermin_correlation_analytic,
    mermin_correlation_numeric,
    pair_correlation_analytic,
    pair_correlation_numeric,
)
from bref.measurements import (
    bounded_povm,
    bounded_povm_z,
    completeness_defect,
    min_outcome_eigenvalue,
)
from bref.search import maximize_chained_chsh, minimal_rf_scan, quadratic_fit
from bref.states import Direction

h = HalfInt.of

SQRT2 = math.sqrt(2.0)

# Fig.-style boundary rows frozen from the first full scan (regression goldens;
# the minimal frame sizes are exact, angle/value tolerances absorb BLAS noise).
SCAN_GOLDENS = [
    (1, 6, 0.7853981633974483, 2.0372117651196495),
    (2, 23, 0.3923036290638997, 2.01643113802934),
    (3, 44, 0.28094795599801525, 2.0005521971030937),
    (4, 72, 0.22042356296904686, 2.0012940153391625),
    (5, 106, 0.1818323497655593, 2.0008571511515414),
    (6, 146, 0.15492840632807897, 2.0001055444999336),
]


@contextmanager
def criterion(num: int, label: str, budget_s: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE C{num} [{label}]: FAIL "
              f"({time.perf_counter() - start:.1f}s)")
        raise
    elapsed = time.perf_counter() - start
    print(f"ACCEPTANCE C{num} [{label}]: PASS ({elapsed:.1f}s)")
    assert elapsed < budget_s, f"criterion {num} exceeded {budget_s}s budget"


def test_c1_chsh_threshold():
    with criterion(1, "CHSH threshold at j=5/2", budget_s=1.0):
        res = chsh_pair(h(2.5), h(2.5))
        assert res.value == pytest.approx((2 + 50 * SQRT2) / 36, abs=1e-6)
        assert res.value > 2.0
        res2 = chsh_pair(h(2), h(2))
        assert res2.value == pytest.approx((2 + 32 * SQRT2) / 25, abs=1e-6)
        assert res2.value == pytest.approx(1.890193, abs=1e-6)
        assert res2.value < 2.0
        violating = [tj for tj in range(0, 21)
                     if chsh_pair(HalfInt(tj), HalfInt(tj)).violated]
        assert min(violating) == 5          # j = 5/2 is the minimal equal size
        assert violating == list(range(5, 21))


def test_c2_numeric_analytic_equivalence():
    with criterion(2, "analytic vs numeric correlation oracles", budget_s=30.0):
        thetas = np.linspace(0.0, math.pi, 9)
        for tj1 in range(0, 21):
            for tj2 in range(0, 21):
                j1, j2 = HalfInt(tj1), HalfInt(tj2)
                for theta in thetas:
                    num = pair_correlation_numeric(j1, j2, theta)
                    ana = pair_correlation_analytic(j1, j2, theta)
                    assert abs(num - ana) < 1e-10
        rng = np.random.default_rng(2024)
        for n in range(1, 6):
            for _ in range(4):
                settings = [Direction(rng.uniform(0, math.pi),
                                      rng.uniform(0, 2 * math.pi))
                            for _ in range(n)]
                frames = [HalfInt(int(rng.integers(1, 6))) for _ in range(n)]
                num = mermin_correlation_numeric(settings, frames)
                ana = mermin_correlation_analytic(settings, frames)
                assert abs(num - ana) < 1e-10


def test_c3_mermin_thresholds():
    with criterion(3, "Mermin frame-size thresholds", budget_s=1.0):
        threshold = 1.0 / (2.0 * (SQRT2 - 1.0))
        assert threshold == pytest.approx(1.2071067811865475, abs=1e-12)
        for tj in range(0, 41):
            assert (mermin_asymptotic_factor(HalfInt(tj)) > 1.0) == (tj >= 3)
        assert mermin_min_ratio(h(1.5), h(0.5)) == pytest.approx(0.855, abs=1e-3)
        # mixed-unbounded condition: N2 > N1 + 1, exactly, for N <= 1000
        for total in range(1, 1001):
            for n1 in range(0, total + 1, max(1, total // 7)):
                n2 = total - n1
                got = mermin_mixed_violates(MixedFrameSpec(n1, h(0.5), n2, UNBOUNDED))
                assert got == (n2 > n1 + 1), (n1, n2)


def test_c4_exact_mermin_values():
    with criterion(4, "exact Mermin expression values", budget_s=10.0):
        assert mermin_value(3, [h(1.5)] * 3).value == pytest.approx(
            107 / 64, abs=1e-12)
        assert mermin_value(3, [h(2)] * 3).value == pytest.approx(
            255 / 125, abs=1e-12)
        assert mermin_value(6, [h(1.5)] * 6).value == pytest.approx(
            23328 / 4096, abs=1e-12)


@pytest.mark.parametrize("n,j,expected", [
    (3, 1.5, 107 / 64),
    (3, 2.0, 255 / 125),
    (6, 1.5, 23328 / 4096),
])
def test_c4_mermin_numeric_cross_check(n, j, expected):
    # Faithful cross-check of the closed-form Mermin expression against the
    # numeric GHZ path at the X/Y settings.  The two differ for N=3: the
    # assembled sum carries offset 2^(N/2) cos(N pi/4) (here -2) where the
    # closed form uses sqrt(2) cos(N pi/4) (here -1), so the N=3 cases fail
    # by exactly 1/prod(2j+1).  See the decisions ledger.
    with criterion(4, f"Mermin numeric cross-check N={n} j={j}", budget_s=10.0):
        numeric = mermin_value_numeric([h(j)] * n).value
        assert numeric == pytest.approx(expected, abs=1e-10)


def test_c5_classical_angle_constant():
    with criterion(5, "classical optimum angle coefficient", budget_s=120.0):
        for js in (10, 20, 40):
            dtheta, _ = maximize_chained_chsh(h(js), UNBOUNDED)
            x = (2 * js + 1) * dtheta
            assert x == pytest.approx(1.054, rel=0.02), f"j_s={js}: x={x}"


def test_c6_minimal_frame_scan_and_fit():
    with criterion(6, "minimal frame boundary scan + quadratic fit",
                   budget_s=600.0):
        records = []
        for tjs in range(1, 7):
            j_s = HalfInt(tjs)
            cap = HalfInt(10 * tjs * tjs + 100)
            records.append(minimal_rf_scan(j_s, cap))
        mins = [r.two_j_rf_min for r in records]
        assert mins == sorted(mins)                      # monotone boundary
        for rec, (tjs, tmin, dt, smax) in zip(records, SCAN_GOLDENS):
            assert rec.two_j_s == tjs
            assert rec.two_j_rf_min == tmin              # frozen regression
            assert rec.delta_theta_opt == pytest.approx(dt, abs=1e-5)
            assert rec.s_max == pytest.approx(smax, rel=1e-6)
        for rec in records:
            if rec.two_j_s >= 2:                         # within 25% of the law
                js = rec.two_j_s / 2
                law = 6 * js * js + 6 * js
                assert abs(rec.two_j_rf_min / 2 - law) <= 0.25 * law
        fit = quadratic_fit(records)
        assert 4.5 <= fit.a <= 7.5
        assert fit.cubic_coeff is not None
        assert abs(fit.cubic_coeff) < 0.1 * fit.a


def test_c7_povm_structural_suite():
    with criterion(7, "POVM structure and classical limit", budget_s=60.0):
        cases = [(0.5, 0.5), (1, 2), (4, 1.5), (3, 3), (26, 3)]
        for jrf, js in cases:
            povm = bounded_povm_z(h(jrf), h(js))
            assert len(povm.outcomes) == int(2 * min(jrf, js) + 1)
            assert completeness_defect(povm) < 1e-10
            assert min_outcome_eigenvalue(povm) > -1e-10
        rotated = bounded_povm(h(4), h(1.5), Direction(1.1, 0.7))
        assert completeness_defect(rotated) < 1e-10
        assert min_outcome_eigenvalue(rotated) > -1e-10
        for tjs in (1, 2, 6):
            dists = []
            tjrf = 2 * tjs
            while tjrf <= 200 * tjs:
                povm = bounded_povm_z(HalfInt(tjrf), HalfInt(tjs))
                worst = 0.0
                for m, op in povm.outcomes:
                    proj = np.zeros((tjs + 1, tjs + 1))
                    proj[(tjs - m.twice) // 2, (tjs - m.twice) // 2] = 1.0
                    worst = max(worst, float(np.max(np.abs(op - proj))))
                dists.append(worst)
                tjrf *= 2
            assert all(later < earlier for earlier, later in zip(dists, dists[1:]))
            ratios = [later / earlier for earlier, later in zip(dists, dists[1:])]
            assert all(0.35 < r < 0.65 for r in ratios)  # doubling halves it
            assert dists[-1] < 0.04
            final = bounded_povm_z(HalfInt(200 * tjs), HalfInt(tjs))
            worst = 0.0
            for m, op in final.outcomes:
                proj = np.zeros((tjs + 1, tjs + 1))
                proj[(tjs - m.twice) // 2, (tjs - m.twice) // 2] = 1.0
                worst = max(worst, float(np.max(np.abs(op - proj))))
            assert worst < 0.02


def test_c8_chained_baseline():
    with criterion(8, "spin-1/2 chained CHSH baseline", budget_s=10.0):
        dtheta, s = maximize_chained_chsh(h(0.5), UNBOUNDED)
        assert s == pytest.approx(2 * SQRT2, abs=1e-6)
        assert dtheta == pytest.approx(math.pi / 4, abs=1e-4)


def test_c9_cg_kernel_suite():
    with criterion(9, "Clebsch-Gordan kernel suite", budget_s=120.0):
        # closed forms, exact to 1e-12 up to 2j = 200
        for tj in range(1, 201):
            j = tj / 2
            one = clebsch_gordan(CgArgs(
                HalfInt(tj), HalfInt(tj), h(0.5), h(0.5),
                HalfInt(tj + 1), HalfInt(tj + 1)))
            assert abs(one - 1.0) < 1e-12
            delta = clebsch_gordan(CgArgs(
                HalfInt(tj), HalfInt(tj), h(0.5), h(-0.5),
                HalfInt(tj + 1), HalfInt(tj - 1)))
            assert abs(delta - 1.0 / math.sqrt(tj + 1)) < 1e-12
            lower = clebsch_gordan(CgArgs(
                HalfInt(tj), HalfInt(tj), h(0.5), h(-0.5),
                HalfInt(tj - 1), HalfInt(tj - 1)))
            assert abs(lower - math.sqrt(tj / (tj + 1.0))) < 1e-12
        # orthogonality and completeness
        rng = np.random.default_rng(9)
        for _ in range(20):
            tj1 = int(rng.integers(0, 81))
            tj2 = int(rng.integers(0, 81))
            tj = int(rng.integers(abs(tj1 - tj2), tj1 + tj2 + 1))
            if (tj1 + tj2 + tj) % 2:
                continue
            tm = int(rng.integers(-tj, tj + 1))
            tm -= (tm - tj) % 2
            _, vals = cg_family(tj1, tj2, tj, tm)
            if vals.size:
                assert abs(float(vals @ vals) - 1.0) < 1e-9
        for tj1, tm1, tj2, tm2 in [(61, 11, 44, -8), (80, 0, 80, 2)]:
            total = 0.0
            for tj in range(abs(tj1 - tj2), tj1 + tj2 + 1, 2):
                c = clebsch_gordan(CgArgs(
                    HalfInt(tj1), HalfInt(tm1), HalfInt(tj2), HalfInt(tm2),
                    HalfInt(tj), HalfInt(tm1 + tm2)))
                total += c * c
            assert abs(total - 1.0) < 1e-9
        # dual-path agreement up to 2j = 4000
        rng = np.random.default_rng(90)
        checked = 0
        while checked < 10:
            tj1 = int(rng.integers(0, 4001))
            tj2 = int(rng.integers(0, 4001))
            tj = int(rng.integers(abs(tj1 - tj2), tj1 + tj2 + 1))
            if (tj1 + tj2 + tj) % 2:
                continue
            tm = int(rng.integers(-tj, tj + 1))
            tm -= (tm - tj) % 2
            lo = max(-tj1, tm - tj2)
            hi = min(tj1, tm + tj2)
            if hi < lo:
                continue
            tm1 = lo + 2 * int(rng.integers(0, (hi - lo) // 2 + 1))
            args = CgArgs(HalfInt(tj1), HalfInt(tm1), HalfInt(tj2),
                          HalfInt(tm - tm1), HalfInt(tj), HalfInt(tm))
            assert abs(cg_racah(args) - cg_recurrence(args)) < 1e-8
            checked += 1
