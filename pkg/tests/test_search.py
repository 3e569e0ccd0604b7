import math

import numpy as np
import pytest

from bref.angular import HalfInt
from bref.bell import chained_chsh_parity
from bref.correlations import UNBOUNDED
from bref.errors import DegenerateDesign
from bref.search import (
    FitResult,
    NotFoundBelowCap,
    ScanRecord,
    heuristic_bound,
    heuristic_ok,
    maximize_chained_chsh,
    minimal_rf_scan,
    quadratic_fit,
)
from bref.states import coherent_amplitudes, Direction

h = HalfInt.of


class TestMaximize:
    def test_classical_spin_half_baseline(self):
        dtheta, s = maximize_chained_chsh(h(0.5), UNBOUNDED)
        assert dtheta == pytest.approx(math.pi / 4, abs=1e-4)
        assert s == pytest.approx(2 * math.sqrt(2), abs=1e-6)

    def test_tiny_frame_cannot_violate(self):
        _, s = maximize_chained_chsh(h(0.5), h(0.5))
        assert s <= 2.0

    @pytest.mark.parametrize("js,jrf", [(0.5, 4), (1, 12), (2, 20)])
    def test_matches_dense_grid_reference(self, js, jrf):
        dtheta, s = maximize_chained_chsh(h(js), h(jrf))
        hi = min(math.pi / 3, 8 * 1.054 / (2 * js + 1))
        xs = np.linspace(hi / 10**4, hi, 10**4)
        dense = max(chained_chsh_parity(h(js), h(jrf), x).value for x in xs)
        assert s >= dense - 1e-6

    def test_classical_angle_scales_inversely(self):
        dtheta, _ = maximize_chained_chsh(h(10), UNBOUNDED)
        assert (2 * 10 + 1) * dtheta == pytest.approx(1.054, rel=0.02)


class TestMinimalRfScan:
    def test_smallest_system_spin(self):
        rec = minimal_rf_scan(h(0.5), h(30))
        assert rec.two_j_s == 1
        assert rec.two_j_rf_min == 6
        assert rec.s_max > 2.0 + 1e-9
        # boundary verified on both sides
        _, below = maximize_chained_chsh(h(0.5), HalfInt(rec.two_j_rf_min - 1))
        assert below <= 2.0 + 1e-9

    def test_cap_too_low(self):
        with pytest.raises(NotFoundBelowCap) as exc:
            minimal_rf_scan(h(0.5), h(1))
        assert 0.0 < exc.value.best_s <= 2.0 + 1e-9

    def test_requires_half_spin(self):
        with pytest.raises(ValueError):
            minimal_rf_scan(h(0), h(10))


class TestQuadraticFit:
    def test_exact_recovery(self):
        # records exactly on 6 j^2 + 6 j
        records = [ScanRecord(two_j_s=t, two_j_rf_min=3 * t * t + 6 * t,
                              delta_theta_opt=0.1, s_max=2.1)
                   for t in range(1, 7)]
        fit = quadratic_fit(records)
        assert fit.a == pytest.approx(6.0, abs=1e-8)
        assert fit.b == pytest.approx(6.0, abs=1e-8)
        assert fit.rms_residual < 1e-9
        assert abs(fit.cubic_coeff) < 1e-8

    def test_degenerate_design(self):
        rec = ScanRecord(two_j_s=2, two_j_rf_min=24, delta_theta_opt=0.1, s_max=2.1)
        with pytest.raises(DegenerateDesign):
            quadratic_fit([rec])
        with pytest.raises(DegenerateDesign):
            quadratic_fit([rec, rec])

    def test_two_distinct_points_no_cubic(self):
        records = [ScanRecord(1, 9, 0.1, 2.1), ScanRecord(2, 24, 0.1, 2.1)]
        fit = quadratic_fit(records)
        assert isinstance(fit, FitResult)
        assert fit.cubic_coeff is None
        assert fit.a == pytest.approx(6.0, abs=1e-8)
        assert fit.b == pytest.approx(6.0, abs=1e-8)


class TestHeuristic:
    def test_equatorial_width(self):
        for jrf in (2, 8, 50):
            sigma, unc = heuristic_bound(h(jrf), math.pi / 2)
            assert sigma == pytest.approx(math.sqrt(jrf / 2), abs=1e-12)
            assert unc == pytest.approx(1 / sigma)

    def test_width_matches_coherent_state_moments(self):
        # exact z-projection variance of the coherent state is the binomial one
        jrf, theta = h(50), math.pi / 3
        amps = coherent_amplitudes(jrf, Direction(theta))
        ms = np.array([(jrf.twice - 2 * i) / 2 for i in range(jrf.twice + 1)])
        probs = np.abs(amps) ** 2
        mean = float(probs @ ms)
        var = float(probs @ (ms - mean) ** 2)
        sigma, _ = heuristic_bound(jrf, theta)
        assert var == pytest.approx(sigma ** 2, rel=0.01)
        assert mean == pytest.approx(jrf.value * math.cos(theta), rel=1e-10)

    def test_fitted_law_satisfies_heuristic(self):
        for tjs in range(1, 13):
            jrf = HalfInt(3 * tjs * tjs + 6 * tjs)   # twice (6 j^2 + 6 j)
            assert heuristic_ok(jrf, HalfInt(tjs))

    def test_domain_checks(self):
        with pytest.raises(ValueError):
            heuristic_bound(h(0), 1.0)
        with pytest.raises(ValueError):
            heuristic_bound(h(2), 0.0)
