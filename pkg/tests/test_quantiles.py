"""Estimator behavior: exact small-case values, structural identities,
and the properties every weighted order-statistic estimator must satisfy."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from madkit.errors import DomainError, SampleError
from madkit.quantiles import (
    HD,
    SM,
    THD_SQRT,
    MedianEstimator,
    Sample,
    beta_hdi,
    hd_quantile,
    hd_weights,
    hf7_quantile,
    median,
    median_weights,
    parse_estimator,
    thd,
    thd_quantile,
    thd_weights,
)
from madkit.specfun import BetaParams, beta_pdf

ALL_KINDS = (SM, HD, THD_SQRT)


class TestSample:
    def test_sorts_on_construction(self):
        s = Sample([3.0, 1.0, 2.0])
        assert s.values.tolist() == [1.0, 2.0, 3.0]

    def test_rejects_non_finite(self):
        for bad in ([1.0, math.nan], [1.0, math.inf], [-math.inf]):
            with pytest.raises(DomainError):
                Sample(bad)

    def test_values_read_only(self):
        s = Sample([1.0, 2.0])
        with pytest.raises(ValueError):
            s.values[0] = 5.0

    def test_empty_allowed_but_estimators_reject(self):
        s = Sample([])
        assert len(s) == 0
        with pytest.raises(SampleError):
            median(s, SM)
        with pytest.raises(SampleError):
            hf7_quantile(s, 0.5)


class TestHf7:
    def test_odd_median(self):
        assert hf7_quantile([1, 2, 3], 0.5) == 2.0

    def test_even_median(self):
        assert hf7_quantile([1, 2, 3, 4], 0.5) == 2.5

    def test_interpolation(self):
        # h = 3*0.25 + 1 = 1.75 -> between the first two order statistics
        assert hf7_quantile([1, 2, 3, 4], 0.25) == pytest.approx(1.75, abs=1e-15)

    def test_endpoints(self):
        assert hf7_quantile([5, 1, 9], 0.0) == 1.0
        assert hf7_quantile([5, 1, 9], 1.0) == 9.0

    def test_p_out_of_range(self):
        with pytest.raises(DomainError):
            hf7_quantile([1, 2], 1.5)


class TestHdWeights:
    def test_n2_split_evenly(self):
        assert hd_weights(2, 0.5).weights.tolist() == [0.5, 0.5]

    def test_n3_closed_form(self):
        # I_x(2,2) = x^2(3-2x) at x = 1/3, 2/3 gives 7/27, 20/27
        w = hd_weights(3, 0.5).weights
        assert w == pytest.approx([7 / 27, 13 / 27, 7 / 27], abs=1e-14)

    def test_n1_all_mass(self):
        assert hd_weights(1, 0.5).weights.tolist() == [1.0]

    @pytest.mark.parametrize("p", [0.0, 1.0])
    def test_rejects_boundary_p(self, p):
        with pytest.raises(DomainError):
            hd_weights(5, p)

    def test_symmetry_at_median(self):
        for n in (2, 3, 10, 41, 100):
            w = hd_weights(n, 0.5).weights
            assert np.array_equal(w, w[::-1])

    def test_no_hdi_field(self):
        assert hd_weights(4, 0.3).hdi is None


class TestHdQuantile:
    def test_symmetric_three_points(self):
        assert hd_quantile([0, 1, 2], 0.5) == pytest.approx(1.0, abs=1e-14)

    def test_constant_sample(self):
        for p in (0.2, 0.5, 0.9):
            assert hd_quantile([5, 5, 5, 5], p) == pytest.approx(5.0, abs=1e-12)

    def test_two_points(self):
        assert hd_quantile([0, 1], 0.5) == 0.5

    def test_empty_rejected(self):
        with pytest.raises(SampleError):
            hd_quantile([], 0.5)


class TestBetaHdi:
    def test_symmetric_middle(self):
        assert beta_hdi(BetaParams(2.5, 2.5), 0.5) == (0.25, 0.75)

    def test_degenerate_returns_none(self):
        assert beta_hdi(BetaParams(0.9, 0.9), 0.3) is None

    def test_left_border(self):
        assert beta_hdi(BetaParams(0.5, 3.0), 0.3) == (0.0, 0.3)

    def test_right_border(self):
        assert beta_hdi(BetaParams(3.0, 0.5), 0.3) == (0.7, 1.0)

    def test_full_width(self):
        assert beta_hdi(BetaParams(4.0, 7.0), 1.0) == (0.0, 1.0)

    @pytest.mark.parametrize("width", [0.0, -0.2, 1.2])
    def test_invalid_width(self, width):
        with pytest.raises(DomainError):
            beta_hdi(BetaParams(2.0, 2.0), width)

    def test_middle_case_root_within_tolerance(self):
        # Independent oracle: scipy density + Brent root finder at 1e-13.
        from scipy import optimize, stats

        rng = np.random.default_rng(21)
        checked = 0
        for _ in range(60):
            a, b = rng.uniform(1.1, 60.0), rng.uniform(1.1, 60.0)
            width = float(rng.uniform(0.05, 0.9))
            left, right = beta_hdi(BetaParams(a, b), width)
            assert right - left == pytest.approx(width, abs=1e-9)
            assert 0.0 <= left < right <= 1.0

            def f(l):
                return stats.beta.pdf(l, a, b) - stats.beta.pdf(l + width, a, b)

            mode = (a - 1.0) / (a + b - 2.0)
            lo, hi = max(0.0, mode - width), min(mode, 1.0 - width)
            if hi - lo > 1e-12 and f(lo) * f(hi) < 0:
                expected = optimize.brentq(f, lo, hi, xtol=1e-13)
                assert left == pytest.approx(expected, abs=1e-9)
                checked += 1
        assert checked > 30

    def test_interval_actually_maximizes_mass(self):
        # Sliding the window off the solution must not increase the content.
        from madkit.specfun import reg_inc_beta

        params = BetaParams(3.7, 9.2)
        width = 0.25
        left, right = beta_hdi(params, width)
        best = reg_inc_beta(right, params) - reg_inc_beta(left, params)
        for shift in (-0.05, -0.01, 0.01, 0.05):
            lo = min(max(left + shift, 0.0), 1.0 - width)
            mass = reg_inc_beta(lo + width, params) - reg_inc_beta(lo, params)
            assert mass <= best + 1e-9


class TestThdWeights:
    def test_n4_half_width_collapses_to_middle_pair(self):
        w = thd_weights(4, 0.5, 0.5).weights
        assert w.tolist() == [0.0, 0.5, 0.5, 0.0]

    def test_n1_single_weight(self):
        assert thd_weights(1, 0.5, 0.7).weights.tolist() == [1.0]

    def test_full_width_equals_untrimmed(self):
        w_full = thd_weights(3, 0.5, 1.0).weights
        assert np.array_equal(w_full, hd_weights(3, 0.5).weights)

    def test_degenerate_falls_back_to_hd(self):
        # n = 1 at p = 0.5 gives Beta(1, 1): degenerate HDI
        w = thd_weights(1, 0.5, 0.5)
        assert w.weights.tolist() == [1.0]
        assert w.hdi is None

    def test_hdi_field_width(self):
        w = thd_weights(10, 0.3, 0.4)
        assert w.hdi is not None
        left, right, width = w.hdi
        assert right - left == pytest.approx(width, abs=1e-9)
        assert width == pytest.approx(0.4, abs=1e-12)

    def test_weights_outside_window_are_zero(self):
        w = thd_weights(20, 0.5, 1 / math.sqrt(20))
        nz = np.nonzero(w.weights)[0]
        assert nz.size < 20  # genuinely trimmed
        assert w.weights.sum() == pytest.approx(1.0, abs=1e-10)


class TestThdQuantile:
    def test_four_points_half_width(self):
        assert thd_quantile([1, 2, 3, 4], 0.5, 0.5) == 2.5

    def test_singleton(self):
        assert thd_quantile([7], 0.5) == 7.0

    def test_full_width_matches_hd(self):
        assert thd_quantile([0, 1, 2], 0.5, 1.0) == pytest.approx(
            hd_quantile([0, 1, 2], 0.5), abs=1e-15
        )


class TestMedianDispatch:
    def test_sm_ignores_outlier(self):
        assert median([1, 2, 100], SM) == 2.0

    def test_hd_two_points(self):
        assert median([0, 1], HD) == 0.5

    def test_thd_custom_width(self):
        assert median([1, 2, 3, 4], thd(0.5)) == 2.5

    def test_parse_estimator(self):
        assert parse_estimator("sm") == SM
        assert parse_estimator("HD") == HD
        assert parse_estimator("thd-sqrt") == THD_SQRT
        assert parse_estimator("thd(0.25)") == thd(0.25)
        with pytest.raises(DomainError):
            parse_estimator("median")

    def test_labels(self):
        assert SM.label == "sm" and HD.label == "hd"
        assert THD_SQRT.label == "thd-sqrt"
        assert thd(0.25).label == "thd(0.25)"

    def test_kind_validation(self):
        with pytest.raises(DomainError):
            MedianEstimator("sm", width=0.5)
        with pytest.raises(DomainError):
            thd(0.0)
        with pytest.raises(DomainError):
            thd(1.5)


class TestStructuralIdentities:
    def test_two_point_collapse_is_exact(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            x = rng.standard_normal(2) * rng.uniform(0.1, 100)
            s = Sample(x)
            expected = 0.5 * (s.values[0] + s.values[1])
            for kind in ALL_KINDS:
                assert median(s, kind) == expected

    def test_n4_thd_sqrt_equals_sm_exactly(self):
        rng = np.random.default_rng(8)
        for _ in range(300):
            s = Sample(rng.standard_normal(4) * 10)
            assert median(s, THD_SQRT) == median(s, SM)

    def test_median_weights_reproduce_median(self):
        rng = np.random.default_rng(9)
        for n in (1, 2, 3, 4, 5, 8, 13, 40):
            s = Sample(rng.standard_normal(n))
            for kind in ALL_KINDS:
                w = median_weights(n, kind)
                assert float(np.dot(w, s.values)) == pytest.approx(
                    median(s, kind), rel=1e-13, abs=1e-13
                )


class TestWeightProperties:
    @pytest.mark.parametrize("kind", ["hd", "thd"])
    def test_normalization_quick_grid(self, kind):
        for n in (1, 2, 3, 7, 25, 80, 200):
            for p in (0.05, 0.25, 0.5, 0.75, 0.95):
                if kind == "hd":
                    w = hd_weights(n, p).weights
                else:
                    w = thd_weights(n, p, 1 / math.sqrt(n)).weights
                assert w.sum() == pytest.approx(1.0, abs=1e-10)
                assert (w >= -1e-15).all()

    def test_monotone_in_data(self):
        # Raising one observation never lowers a nonnegative-weight estimate.
        rng = np.random.default_rng(10)
        for kind in ALL_KINDS:
            for _ in range(60):
                n = int(rng.integers(2, 12))
                x = rng.standard_normal(n)
                base = median(Sample(x), kind)
                i = int(rng.integers(0, n))
                x2 = x.copy()
                x2[i] += abs(rng.standard_normal()) + 0.1
                assert median(Sample(x2), kind) >= base - 1e-12


@settings(max_examples=120, deadline=None)
@given(
    data=st.lists(st.floats(-1e4, 1e4), min_size=1, max_size=24),
    scale=st.floats(0.01, 1e3),
    shift=st.floats(-1e4, 1e4),
    p=st.floats(0.01, 0.99),
)
def test_affine_equivariance(data, scale, shift, p):
    s = Sample(data)
    mapped = Sample(scale * np.asarray(data) + shift)
    for estimate in (
        lambda v: hf7_quantile(v, p),
        lambda v: hd_quantile(v, p),
        lambda v: thd_quantile(v, p),
    ):
        base = estimate(s)
        assert estimate(mapped) == pytest.approx(scale * base + shift, abs=1e-9 * max(1.0, abs(scale * base + shift)))
