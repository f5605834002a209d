import numpy as np
import pytest

from revbispec import bispec, classify_symmetry
from revbispec.verify import (
    CheckResult,
    format_results,
    random_filter,
    random_skew_symmetric_filter,
    random_symmetric_filter,
    run_battery,
)


@pytest.mark.parametrize("seed", range(5))
def test_generators(seed):
    rng = np.random.default_rng(seed)
    for _ in range(20):
        f = random_filter(rng)
        assert 1 <= f.width <= 9
        assert all(-1 <= v <= 1 for v in f.values)
        assert classify_symmetry(random_symmetric_filter(rng)).kind == "symmetric"
        assert classify_symmetry(random_skew_symmetric_filter(rng)).kind == "skew_symmetric"


def test_small_battery_passes():
    results = run_battery(n_random=40, n_correspondence=5, n_symmetric=20)
    assert [r.name for r in results] == [
        "correspondence_check",
        "triple_product_bound",
        "pathway_agreement",
        "realness_symmetry",
        "phase_symmetry",
        "cocycle",
        "third_order_equivalence",
        "time_reversal",
    ]
    assert all(r.passed for r in results), format_results(results)


def test_sabotaged_normalisation_fails(monkeypatch):
    original = bispec.analytic_bispectrum

    def broken(model, G):
        f = original(model, G)
        return bispec.BifrequencyField(G, 2.0 * f.values, f.kind, f.metadata)

    monkeypatch.setattr(bispec, "analytic_bispectrum", broken)
    results = run_battery(n_random=10, n_correspondence=2, n_symmetric=4)
    failed = [r.name for r in results if not r.passed]
    assert "correspondence_check" in failed


def test_tolerance_override_can_fail_a_check():
    results = run_battery(n_random=5, n_correspondence=1, n_symmetric=4, tolerances={"correspondence": 0.0})
    assert not results[0].passed or results[0].measured == 0.0


def test_format():
    text = format_results([CheckResult("a", True, 0.0, 1.0, "ok"), CheckResult("b", False, 2.0, 1.0)])
    assert text.splitlines() == [
        "PASS a: measured=0.0 tolerance=1.0 ok",
        "FAIL b: measured=2.0 tolerance=1.0",
        "1/2 checks passed",
    ]
