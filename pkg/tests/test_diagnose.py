import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given

from revbispec import (
    DiagnosticReport,
    EstimationPlan,
    InnovationSpec,
    LinearModel,
    calibrate_null,
    causality_verdict,
    diagnose_model,
    diagnose_series,
    empirical_reversibility_probe,
    model_cumulant,
    reverse_model,
    simulate,
    third_order_reversibility_check,
)
from revbispec.diagnose import (
    CAVEAT_BOUNDARY,
    CAVEAT_LINEARITY,
    CAVEAT_ZERO_BISPECTRUM,
    CAVEAT_ZERO_SKEWNESS,
    _combine,
    reversibility_probe_gaps,
)
from revbispec.exceptions import GridTooCoarseError, InsufficientLengthError, InternalInconsistencyError

from conftest import filters, model

PLAN = EstimationPlan(128, 1024)
N = 2 ** 17


class TestDiagnoseModel:
    def test_symmetric_exponential(self, ma1):
        r = diagnose_model(ma1, 64)
        assert (r.bispectrum_pathway, r.coefficient_pathway, r.reversible) == ("yes", "yes", "yes")
        assert r.symmetry == "symmetric" and r.symmetry_index == 1 == r.phase_index
        assert r.causal_linear_possible == "no"
        assert CAVEAT_BOUNDARY in r.caveats

    def test_skew_gaussian(self):
        r = diagnose_model(model([1, 0, -1], innovations=InnovationSpec.gaussian()), 64)
        assert r.reversible == "yes"
        assert r.coefficient_pathway == "yes"
        assert r.bispectrum_pathway == "undetermined"
        assert CAVEAT_ZERO_BISPECTRUM in r.caveats
        assert r.phase_offset == pytest.approx(math.pi / 2)

    def test_asymmetric(self, ma_asym):
        r = diagnose_model(ma_asym, 64)
        assert r.reversible == "no"
        assert r.realness > 0.1
        assert r.causal_linear_possible == "yes"

    def test_gaussian_asymmetric_is_undetermined(self):
        r = diagnose_model(model([1, 0.5], innovations=InnovationSpec.gaussian()), 64)
        assert r.reversible == "undetermined"
        assert CAVEAT_ZERO_BISPECTRUM in r.caveats

    def test_skew_symmetric_with_skewed_noise(self):
        r = diagnose_model(model([1, 0, -1]), 64)
        # skewed innovations rule out the skew branch of the coefficient route; the field is purely imaginary
        assert r.reversible == "no"
        assert r.realness == pytest.approx(1.0)

    def test_grid_too_coarse(self, ma1):
        with pytest.raises(GridTooCoarseError):
            diagnose_model(ma1, 31)

    def test_pathway_clash_raises(self):
        with pytest.raises(InternalInconsistencyError, match="internal inconsistency"):
            _combine("yes", "no")
        assert _combine("undetermined", "no") == "no"
        assert _combine("undetermined", "undetermined") == "undetermined"

    @given(filters())
    def test_reversal_keeps_verdict(self, f):
        m = LinearModel(f, InnovationSpec.centered_exponential())
        G = 8 * (f.width + 2) * 2
        assert diagnose_model(reverse_model(m), G).reversible == diagnose_model(m, G).reversible

    @given(filters())
    def test_yes_requires_a_pathway(self, f):
        r = diagnose_model(LinearModel(f, InnovationSpec.two_point(0.5)), 128)
        if r.reversible == "yes":
            bispectrum_route = r.bispectrum_real and r.bispectrum_nonzero and r.spectrum_positive
            coefficient_route = r.symmetry == "symmetric" or (r.symmetry == "skew_symmetric" and r.innovations_symmetric)
            assert bispectrum_route or coefficient_route
        if r.causal_linear_possible == "no":
            assert r.bispectrum_real and r.bispectrum_nonzero and r.spectrum_positive


class TestCausality:
    def test_symmetric(self, ma1):
        v = causality_verdict(diagnose_model(ma1, 64))
        assert v.verdict == "no_causal_representation"
        assert v.caveats == (CAVEAT_BOUNDARY,)

    def test_asymmetric(self, ma_asym):
        assert causality_verdict(diagnose_model(ma_asym, 64)).verdict == "possible"

    def test_gaussian(self):
        r = diagnose_model(model([1, 2, 1], innovations=InnovationSpec.gaussian()), 64)
        assert causality_verdict(r).verdict == "undetermined"


class TestThirdOrder:
    def test_symmetric(self):
        m = model([1, 2, 1])
        chk = third_order_reversibility_check(m, 3)
        assert chk.consistent and chk.skewed
        assert diagnose_model(m, 64).reversible == "yes"

    def test_asymmetric(self, ma_asym):
        chk = third_order_reversibility_check(ma_asym, 2)
        assert not chk.consistent and chk.defect >= 0.5
        assert diagnose_model(ma_asym, 64).reversible == "no"

    def test_gaussian_flags_zero_skewness(self):
        chk = third_order_reversibility_check(model([1, 0.5], innovations=InnovationSpec.gaussian()), 2)
        assert chk.consistent and not chk.skewed
        assert CAVEAT_ZERO_SKEWNESS in chk.caveats

    def test_lag_too_small(self):
        with pytest.raises(ValueError):
            third_order_reversibility_check(model([1, 2, 3]), 2)

    @given(filters())
    def test_agrees_with_verdict_when_skewed(self, f):
        m = LinearModel(f, InnovationSpec.centered_exponential())
        chk = third_order_reversibility_check(m, f.width)
        if chk.skewed:
            assert chk.consistent == (diagnose_model(m, 8 * (f.width + 2) * 2).reversible == "yes")


class TestReportSerialisation:
    @pytest.mark.parametrize("values", [[1, 1], [1, 0.5], [1, 0, -1]])
    def test_json_and_text_round_trip(self, values):
        r = diagnose_model(model(values), 64)
        assert DiagnosticReport.from_json(r.to_json()) == r
        assert DiagnosticReport.from_text(r.to_text()) == r

    def test_json_mirrors_text(self, ma1):
        r = diagnose_model(ma1, 64)
        doc = r.to_dict()
        assert doc["verdicts"] == {"reversible": "yes", "causal_linear_possible": "no"}
        keys = [line.split(":")[0] for line in r.to_text().splitlines()]
        flat = []

        def walk(d, prefix):
            for k, v in d.items():
                if isinstance(v, dict):
                    walk(v, prefix + k + ".")
                else:
                    flat.append(prefix + k)

        walk(doc, "")
        assert keys == flat

    def test_report_is_immutable(self, ma1):
        r = diagnose_model(ma1, 64)
        with pytest.raises(dataclasses.FrozenInstanceError):
            r.reversible = "no"


class TestDiagnoseSeries:
    @pytest.mark.slow
    def test_symmetric_model(self):
        r = diagnose_series(simulate(model([1, 2, 1]), N, seed=1), PLAN)
        assert r.reversible == "yes"
        assert r.realness < r.realness_threshold
        assert CAVEAT_LINEARITY in r.caveats

    @pytest.mark.slow
    def test_asymmetric_model(self, ma_asym):
        r = diagnose_series(simulate(ma_asym, N, seed=1), PLAN)
        assert r.reversible == "no"
        assert r.causal_linear_possible == "yes"

    @pytest.mark.slow
    def test_gaussian_white_noise(self):
        r = diagnose_series(simulate(model([1], innovations=InnovationSpec.gaussian()), N, seed=1), PLAN)
        assert r.reversible == "undetermined"
        assert not r.bispectrum_nonzero
        assert CAVEAT_ZERO_BISPECTRUM in r.caveats

    def test_insufficient_length(self):
        with pytest.raises(InsufficientLengthError):
            diagnose_series(np.ones(100), PLAN)

    def test_fixed_thresholds_skip_calibration(self, ma_asym):
        x = simulate(ma_asym, 64 * 64, seed=0)
        r = diagnose_series(x, EstimationPlan(64, 64), realness_threshold=0.5, norm_floor=0.0)
        assert r.realness_threshold == 0.5 and r.field_norm_floor == 0.0

    def test_calibration_is_deterministic(self, ma1):
        x = simulate(ma1, 64 * 64, seed=0)
        plan = EstimationPlan(64, 64)
        a = calibrate_null(x, plan, n_replicates=3, seed=5)
        b = calibrate_null(x, plan, n_replicates=3, seed=5)
        assert a == b
        assert a.realness_threshold > 0 and a.norm_floor > 0

    def test_constant_series(self):
        r = diagnose_series(np.ones(512), EstimationPlan(32, 16))
        assert r.reversible == "undetermined"


class TestProbe:
    @pytest.mark.slow
    def test_symmetric_within_noise(self, ma1):
        gaps = np.array([reversibility_probe_gaps(simulate(ma1, N, seed=s), 4) for s in range(10)])
        se = gaps.std(axis=0, ddof=1) / math.sqrt(10)
        assert np.all(np.abs(gaps.mean(axis=0)) <= 5 * se)

    @pytest.mark.slow
    def test_asymmetric_significant(self, ma_asym):
        gaps = np.array([reversibility_probe_gaps(simulate(ma_asym, N, seed=s), 4) for s in range(10)])
        # population gap at lag 1: cum(0,0,1) - cum(0,1,1)
        target = model_cumulant(ma_asym, 0, 1) - model_cumulant(ma_asym, 1, 1)
        se = gaps[:, 0].std(ddof=1) / math.sqrt(10)
        assert gaps[:, 0].mean() > 5 * se
        assert abs(gaps[:, 0].mean() - target) <= 5 * se

    def test_iid_within_noise(self, rng):
        x = rng.exponential(size=50_000)
        assert empirical_reversibility_probe(x, 3) < 0.15

    def test_length_guard(self):
        with pytest.raises(InsufficientLengthError):
            empirical_reversibility_probe(np.ones(40), 4)
