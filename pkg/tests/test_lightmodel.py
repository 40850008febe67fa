from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bsvsim import (analytic_gn, bsv, coherent, estimate_factorial_gn,
                    estimate_gn, poissonize, sample_ensemble, thermal)
from bsvsim.lightmodel import MAX_ANALYTIC_ORDER, LightModel

from oracles import quadrature_intensity_moment


def double_factorial(k):
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


class TestAnalyticGn:
    def test_superbunched_endpoint_exact(self):
        for n in range(1, 6):
            assert analytic_gn(bsv(7.5), n) == Fraction(double_factorial(2 * n - 1))

    def test_thermal_endpoint_exact(self):
        import math
        for n in range(1, 6):
            assert analytic_gn(thermal(7.5), n) == Fraction(math.factorial(n))

    def test_coherent_is_unity(self):
        assert analytic_gn(coherent(123.0), 4) == 1

    def test_known_values(self):
        assert analytic_gn(bsv(1.0), 2) == 3
        assert analytic_gn(bsv(1.0), 4) == 105
        assert analytic_gn(thermal(1.0), 3) == 6
        assert analytic_gn(bsv(1.0, temporal_modes=2), 2) == 2

    def test_general_ratio_matches_quadrature_oracle(self, gauss_hermite_nodes):
        for r in (0.0, 0.3, 0.7, 1.0):
            a, b = 1.0 / (1.0 + r), r / (1.0 + r)
            for n in (2, 3, 4):
                oracle = quadrature_intensity_moment(a, b, n, gauss_hermite_nodes)
                got = float(analytic_gn(bsv(1.0, quad_ratio=r), n))
                assert got == pytest.approx(oracle, rel=1e-12)

    def test_multimode_matches_convolution_oracle(self, gauss_hermite_nodes):
        # two iid modes: E[(W1+W2)^2] = 2 E[W^2] + 2 E[W]^2, unit mode mean
        m2 = quadrature_intensity_moment(1.0, 0.0, 2, gauss_hermite_nodes)
        oracle_g2 = (2 * m2 + 2) / 4.0
        assert float(analytic_gn(bsv(5.0, temporal_modes=2), 2)) == pytest.approx(
            oracle_g2, rel=1e-12)

    @pytest.mark.parametrize("modes", [1, 2, 3, 10, 20])
    @pytest.mark.parametrize("r", [0.0, 0.4, 1.0])
    def test_multimode_reduction_law(self, modes, r):
        g1 = analytic_gn(bsv(1.0, quad_ratio=r), 2)
        gm = analytic_gn(bsv(1.0, quad_ratio=r, temporal_modes=modes), 2)
        assert gm == 1 + (g1 - 1) / modes

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_monotone_decreasing_in_quad_ratio(self, n):
        grid = [analytic_gn(bsv(1.0, quad_ratio=r / 10), n) for r in range(11)]
        assert all(a > b for a, b in zip(grid, grid[1:]))

    def test_order_range_errors(self):
        with pytest.raises(ValueError):
            analytic_gn(bsv(1.0), 0)
        with pytest.raises(ValueError):
            analytic_gn(bsv(1.0), MAX_ANALYTIC_ORDER + 1)

    def test_returns_exact_rationals_up_to_max_order(self):
        g = analytic_gn(bsv(1.0), MAX_ANALYTIC_ORDER)
        assert isinstance(g, Fraction)
        assert g == double_factorial(2 * MAX_ANALYTIC_ORDER - 1)


class TestSampling:
    def test_coherent_is_constant(self):
        ens = sample_ensemble(coherent(1000.0), 100, seed=1)
        assert np.all(ens.mode_intensities == 1000.0)

    def test_mean_within_clt_bound(self):
        # sd of the mean for r=0 is mean * sqrt(2) / sqrt(pulses)
        ens = sample_ensemble(bsv(1000.0), 10 ** 6, seed=2)
        assert 990.0 <= ens.total_intensity.mean() <= 1010.0

    def test_thermal_g2_within_three_se(self):
        ens = sample_ensemble(thermal(1000.0), 10 ** 6, seed=3)
        est = estimate_gn(ens.total_intensity, 2, seed=3)
        assert abs(est.value - 2.0) <= 3 * est.std_error

    def test_modes_share_mean(self):
        ens = sample_ensemble(bsv(1000.0, temporal_modes=4), 200_000, seed=4)
        per_mode = ens.mode_intensities.mean(axis=0)
        assert np.allclose(per_mode, 250.0, rtol=0.02)

    def test_deterministic_and_partition_independent(self):
        a = sample_ensemble(bsv(50.0, temporal_modes=3), 40_000, seed=9)
        b = sample_ensemble(bsv(50.0, temporal_modes=3), 40_000, seed=9)
        c = sample_ensemble(bsv(50.0, temporal_modes=3), 40_000, seed=9, threads=5)
        assert np.array_equal(a.mode_intensities, b.mode_intensities)
        assert np.array_equal(a.mode_intensities, c.mode_intensities)

    def test_distinct_streams_differ(self):
        a = sample_ensemble(bsv(50.0), 1000, seed=9, stream_id=0)
        b = sample_ensemble(bsv(50.0), 1000, seed=9, stream_id=1)
        assert not np.array_equal(a.mode_intensities, b.mode_intensities)

    def test_zero_pulses_rejected(self):
        with pytest.raises(ValueError):
            sample_ensemble(bsv(1.0), 0, seed=1)

    @given(seed=st.integers(0, 2 ** 63 - 1))
    @settings(max_examples=20, deadline=None)
    def test_nonnegative_finite(self, seed):
        ens = sample_ensemble(bsv(10.0, quad_ratio=0.5), 256, seed=seed)
        assert np.all(ens.mode_intensities >= 0)
        assert np.all(np.isfinite(ens.mode_intensities))


class TestPoissonize:
    def test_zero_intensity_gives_zero_counts(self):
        counts = poissonize(np.zeros(100), 0.9, seed=1)
        assert np.all(counts == 0)

    def test_coherent_counts_are_poisson(self):
        w = np.full(10 ** 6, 100.0)
        counts = poissonize(w, 1.0, seed=5)
        est = estimate_factorial_gn(counts, 2, seed=5)
        assert abs(est.value - 1.0) <= 3 * est.std_error

    def test_loss_leaves_normalized_factorial_moments(self):
        ens = sample_ensemble(thermal(50.0), 10 ** 6, seed=6)
        counts = poissonize(ens.total_intensity, 0.85, seed=6)
        est = estimate_factorial_gn(counts, 2, seed=6)
        assert abs(est.value - 2.0) <= 3 * est.std_error

    @pytest.mark.parametrize("n,target", [(2, 3.0), (3, 15.0)])
    def test_moment_bridge_to_analytic_gn(self, n, target):
        ens = sample_ensemble(bsv(1000.0), 10 ** 6, seed=7)
        counts = poissonize(ens.total_intensity, 0.85, seed=7)
        est = estimate_factorial_gn(counts, n, seed=7)
        assert abs(est.value - target) <= 3 * est.std_error

    def test_efficiency_range_checked(self):
        with pytest.raises(ValueError):
            poissonize(np.ones(4), 1.5, seed=1)
