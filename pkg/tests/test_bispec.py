import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from revbispec import (
    BifrequencyField,
    EstimationPlan,
    InnovationSpec,
    LinearModel,
    TimeSeriesSample,
    analytic_bispectrum,
    correspondence_check,
    estimate_bispectrum,
    estimate_spectrum,
    model_cumulant,
    realness_statistic,
    reverse_model,
    simulate,
    transfer_function_grid,
    triple_product_bound_check,
)
from revbispec.exceptions import GridTooCoarseError, InsufficientLengthError

from conftest import filters, gamma2, model, skew_symmetric_filters, symmetric_filters


def fourier_oracle(m, G):
    # independent route: B = (2 pi)^-2 sum_{t1,t2} cum(t1, t2) exp(-i (t1 w1 + t2 w2))
    W = m.filter.width
    lags = np.arange(-W, W + 1)
    w = 2 * np.pi * np.arange(G) / G
    C = np.array([[model_cumulant(m, a, b) for b in lags] for a in lags])
    E = np.exp(-1j * np.outer(w, lags))
    return E @ C @ E.T / (2 * np.pi) ** 2


class TestAnalytic:
    def test_value_at_origin(self, ma1):
        assert analytic_bispectrum(ma1, 64).at(0.0, 0.0) == pytest.approx(4 / math.pi ** 2, rel=1e-14)

    def test_symmetric_is_real(self, ma1):
        assert np.abs(analytic_bispectrum(ma1, 64).values.imag).max() <= 1e-12

    def test_gaussian_is_zero(self):
        f = analytic_bispectrum(model([1, 0.3], innovations=InnovationSpec.gaussian()), 32)
        assert not np.any(f.values)

    @given(filters(max_width=6), st.sampled_from([16, 24, 64]))
    def test_matches_fourier_oracle(self, f, G):
        m = LinearModel(f, gamma2())
        np.testing.assert_allclose(analytic_bispectrum(m, G).values, fourier_oracle(m, G), atol=1e-12)

    @given(filters())
    def test_field_symmetries(self, f):
        v = analytic_bispectrum(LinearModel(f, gamma2()), 64).values
        neg = (-np.arange(64)) % 64
        assert np.abs(v - np.conj(v[np.ix_(neg, neg)])).max() <= 1e-10
        assert np.abs(v - v.T).max() <= 1e-10

    @given(filters())
    def test_scaling_by_two(self, f):
        a = analytic_bispectrum(LinearModel(f, gamma2()), 32)
        b = analytic_bispectrum(LinearModel(f.scaled(2.0), gamma2()), 32)
        np.testing.assert_allclose(b.values, 8 * a.values, atol=1e-12 * max(1.0, np.abs(b.values).max()))
        assert realness_statistic(b) == pytest.approx(realness_statistic(a), abs=1e-12)

    @given(symmetric_filters())
    def test_symmetric_filters_give_real_fields(self, f):
        v = analytic_bispectrum(LinearModel(f, gamma2()), 64).values
        assert np.abs(v.imag).max() <= 1e-10 * max(np.abs(v).max(), 1e-300)

    @given(skew_symmetric_filters())
    def test_skew_symmetric_filters_give_imaginary_fields(self, f):
        v = analytic_bispectrum(LinearModel(f, gamma2()), 64).values
        assert np.abs(v.real).max() <= 1e-10 * max(np.abs(v).max(), 1e-300)

    @given(filters())
    def test_reversal_conjugates(self, f):
        m = LinearModel(f, gamma2())
        a = analytic_bispectrum(m, 32).values
        b = analytic_bispectrum(reverse_model(m), 32).values
        assert np.abs(b - np.conj(a)).max() <= 1e-10 * max(1.0, np.abs(a).max())


class TestCorrespondence:
    @pytest.mark.parametrize("values, T, G", [([1, 1], 2, 64), ([1, 0.5, 0.25], 3, 128)])
    def test_examples(self, values, T, G):
        assert correspondence_check(model(values, innovations=gamma2()), G, T) <= 1e-9

    def test_gaussian_is_exactly_zero(self):
        assert correspondence_check(model([1, 2], innovations=InnovationSpec.gaussian()), 64, 2) <= 1e-12

    def test_grid_too_coarse(self, ma1):
        with pytest.raises(GridTooCoarseError, match="grid too coarse"):
            correspondence_check(ma1, 16, 2)

    @given(filters(max_width=9), st.integers(1, 5))
    def test_random_filters(self, f, T):
        m = LinearModel(f, gamma2())
        G = 8 * (f.width + T)
        assert correspondence_check(m, G, T) <= 1e-9

    def test_broken_field_is_detected(self, ma1):
        bad = analytic_bispectrum(ma1, 64)
        doubled = BifrequencyField(64, 2 * bad.values)
        assert correspondence_check(ma1, 64, 2, field=doubled) > 1.0


class TestFieldSerialisation:
    def test_csv_round_trip(self, ma_asym):
        f = analytic_bispectrum(ma_asym, 16)
        text = f.to_csv()
        assert text.splitlines()[0] == "omega1,omega2,re,im"
        back = BifrequencyField.from_csv(text)
        np.testing.assert_array_equal(back.values, f.values)

    def test_metadata_is_sorted_json(self, ma_asym):
        meta = analytic_bispectrum(ma_asym, 16).metadata_text()
        assert meta.index('"grid_size"') < meta.index('"kind"') < meta.index('"metadata"')

    def test_shape_checked(self):
        with pytest.raises(ValueError):
            BifrequencyField(4, np.zeros((3, 3)))


class TestEstimationPlan:
    def test_odd_segment_rejected(self):
        with pytest.raises(ValueError):
            EstimationPlan(127, 4)

    def test_unknown_taper_rejected(self):
        with pytest.raises(ValueError):
            EstimationPlan(64, 4, "kaiser")

    def test_insufficient_length(self):
        with pytest.raises(InsufficientLengthError, match="insufficient length"):
            estimate_bispectrum(np.ones(100), EstimationPlan(64, 2))

    def test_for_length(self):
        plan = EstimationPlan.for_length(1000, 64)
        assert (plan.n_segments, plan.required_length) == (15, 960)


class TestEstimator:
    def test_zero_series_gives_zero_field(self):
        f = estimate_bispectrum(np.zeros(256), EstimationPlan(32, 8))
        assert not np.any(f.values)
        assert realness_statistic(f) == 0.0

    def test_matches_direct_biperiodogram(self, rng):
        x = rng.standard_normal(64) ** 2
        plan = EstimationPlan(16, 4, "hann")
        w = plan.window()
        acc = np.zeros((16, 16), complex)
        for seg in x.reshape(4, 16):
            d = np.fft.fft((seg - seg.mean()) * w)
            for j in range(16):
                for k in range(16):
                    acc[j, k] += d[j] * d[k] * np.conj(d[(j + k) % 16])
        expected = acc / (4 * np.sum(w ** 3) * (2 * np.pi) ** 2)
        np.testing.assert_allclose(estimate_bispectrum(x, plan).values, expected, atol=1e-12)

    def test_estimate_is_permutation_symmetric(self, rng):
        f = estimate_bispectrum(rng.exponential(size=4096), EstimationPlan(64, 64))
        np.testing.assert_array_equal(f.values, f.values.T)

    def test_reversed_sample_conjugates(self, ma_asym):
        # reversing a segment conjugates its DFT up to a linear phase that cancels in the triple product
        plan = EstimationPlan(64, 16)
        x = simulate(ma_asym, 1024, seed=4)
        a = estimate_bispectrum(x, plan).values
        b = estimate_bispectrum(x.reversed(), plan).values
        rel = np.linalg.norm(b - np.conj(a)) / np.linalg.norm(a)
        assert rel < 0.5

    def test_metadata_records_plan(self, ma1):
        x = simulate(ma1, 256, seed=9)
        meta = estimate_bispectrum(x, EstimationPlan(32, 8, "hann")).metadata
        assert meta == {"segment_len": 32, "n_segments": 8, "taper": "hann", "provenance": ma1.identifier, "seed": 9}

    @pytest.mark.slow
    def test_value_near_half_half(self, ma1):
        plan = EstimationPlan(128, 1024)
        target = analytic_bispectrum(ma1, 128).at(0.5, 0.5)
        vals = [estimate_bispectrum(simulate(ma1, 2 ** 17, seed=s), plan).at(0.5, 0.5) for s in range(10)]
        assert abs(np.mean(vals) - target) <= 0.25 * abs(target)

    @pytest.mark.slow
    def test_gaussian_noise_floor(self):
        plan = EstimationPlan(128, 1024)
        g = estimate_bispectrum(simulate(model([1, 0.5], innovations=InnovationSpec.gaussian()), 2 ** 17, 0), plan)
        scale = np.abs(analytic_bispectrum(model([1, 0.5]), 128).values).mean()
        interior = np.abs(g.values[1:, 1:])
        assert interior.max() < 5 * scale

    def test_spectrum_estimate_tracks_truth(self, ma_asym):
        plan = EstimationPlan(32, 2048)
        S = estimate_spectrum(simulate(ma_asym, 32 * 2048, seed=1), plan)
        truth = np.abs(transfer_function_grid(ma_asym.filter, 32)) ** 2
        assert S[0] == pytest.approx(0.0, abs=1e-20)
        np.testing.assert_allclose(S[1:], truth[1:], rtol=0.15)


class TestRealness:
    def test_symmetric_zero(self):
        assert realness_statistic(analytic_bispectrum(model([1, 2, 1]), 64)) <= 1e-12

    def test_asymmetric_positive(self):
        assert realness_statistic(analytic_bispectrum(model([1, 0.5], innovations=gamma2()), 64)) > 0.1

    def test_zero_field(self):
        assert realness_statistic(BifrequencyField(8, np.zeros((8, 8)))) == 0.0

    def test_purely_imaginary_field(self):
        assert realness_statistic(BifrequencyField(8, 1j * np.ones((8, 8)))) == 1.0

    def test_floor_excludes_small_points(self):
        v = np.ones((8, 8), complex)
        v[0, 0] = 1e-6j
        f = BifrequencyField(8, v)
        assert realness_statistic(f, 1e-3) == 0.0
        assert realness_statistic(f, 0.0) > 0.0


class TestTripleProduct:
    def test_constant_equality(self):
        r = triple_product_bound_check(np.ones(32), np.ones(32), np.ones(32))
        assert r.holds
        assert r.left == pytest.approx((2 * np.pi) ** 2, rel=1e-12)
        assert abs(r.left - r.right) / r.right <= 1e-9

    def test_zero_function(self):
        r = triple_product_bound_check(np.zeros(16), np.ones(16), np.ones(16))
        assert r.holds and r.left == 0.0 and r.right == 0.0

    @given(filters(), filters(), filters())
    def test_transfer_functions_satisfy_bound(self, a, b, c):
        psis = [transfer_function_grid(f, 64) for f in (a, b, c)]
        r = triple_product_bound_check(*psis)
        assert r.holds and r.violation == 0.0

    def test_small_grid_rejected(self):
        with pytest.raises(ValueError):
            triple_product_bound_check(np.ones(4), np.ones(4), np.ones(4))

    def test_mismatched_grids_rejected(self):
        with pytest.raises(ValueError):
            triple_product_bound_check(np.ones(8), np.ones(16), np.ones(8))
