"""Cross-module oracle battery behind ``revbispec verify``.

Every check compares two independently computed quantities (quadrature
against the triple sum, phase fit against coefficient symmetry, the
bispectrum route against the coefficient route, ...) and reports the
measured error next to its tolerance.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from . import bispec
from .cumulant import model_cumulant_table, third_order_symmetry_defect
from .diagnose import YES, diagnose_model, third_order_reversibility_check
from .exceptions import InternalInconsistencyError
from .linmodel import (
    FilterCoefficients,
    InnovationSpec,
    LinearModel,
    classify_symmetry,
    reverse_model,
    transfer_function_grid,
)
from .phase import cocycle_residual, extract_phase, fit_half_integer_slope, symmetry_index_from_phase

__all__ = [
    "CheckResult",
    "DEFAULT_TOLERANCES",
    "random_filter",
    "random_symmetric_filter",
    "random_skew_symmetric_filter",
    "builtin_models",
    "run_battery",
    "format_results",
]

DEFAULT_TOLERANCES = {
    "correspondence": 1e-9,
    "triple_product": 1e-9,
    "realness": 1e-9,
    "realness_gap": 1e-3,
    "phase_residual": 1e-9,
    "cocycle": 1e-9,
    "cocycle_asymmetric": 0.05,
    "reversal": 1e-10,
}


class CheckResult(NamedTuple):
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""


def _nonzero_uniform(rng, size):
    v = rng.uniform(-1.0, 1.0, size)
    while np.any(v == 0.0):
        v[v == 0.0] = rng.uniform(-1.0, 1.0, int(np.sum(v == 0.0)))
    return v


def random_filter(rng, max_width=9, k_range=4):
    """Width uniform in ``1..max_width``, coefficients uniform in ``[-1, 1]``."""
    w = int(rng.integers(1, max_width + 1))
    k_min = int(rng.integers(-k_range, k_range + 1))
    return FilterCoefficients(k_min, tuple(_nonzero_uniform(rng, w)))


def random_symmetric_filter(rng, max_width=9, k_range=4):
    w = int(rng.integers(1, max_width + 1))
    half = _nonzero_uniform(rng, (w + 1) // 2)
    vals = np.concatenate([half, half[::-1][w % 2:]])
    k_min = int(rng.integers(-k_range, k_range + 1))
    return FilterCoefficients(k_min, tuple(vals))


def random_skew_symmetric_filter(rng, max_width=9, k_range=4):
    w = int(rng.integers(2, max_width + 1))
    half = _nonzero_uniform(rng, w // 2)
    mid = [0.0] if w % 2 else []
    vals = np.concatenate([half, mid, -half[::-1]])
    k_min = int(rng.integers(-k_range, k_range + 1))
    return FilterCoefficients(k_min, tuple(vals))


def builtin_models():
    exp1 = InnovationSpec.centered_exponential(1.0)
    return [
        (LinearModel(FilterCoefficients(0, (1.0, 1.0)), exp1, "ma1-symmetric"), 2, 64),
        (LinearModel(FilterCoefficients(0, (1.0, 0.5, 0.25)), exp1, "ma2-decaying"), 3, 128),
        (LinearModel(FilterCoefficients(0, (1.0, 2.0, 1.0)), InnovationSpec.gaussian(), "ma2-gaussian"), 2, 64),
        (LinearModel(FilterCoefficients(0, (1.0, 0.0, -1.0)), exp1, "ma2-skew"), 3, 64),
    ]


def _max_phase_n(f):
    return max(f.width, 2 * max(abs(f.k_min), abs(f.k_max)))


def _check_correspondence(rng, tol, n_random, extra_models):
    worst, where = 0.0, ""
    cases = list(builtin_models())
    for m in extra_models:
        T = 2
        cases.append((m, T, max(64, 8 * (m.filter.width + T))))
    exp2 = InnovationSpec.centered_gamma(1.0, 1.0)  # cum3 = 2
    for i in range(n_random):
        cases.append((LinearModel(random_filter(rng), exp2, f"random-{i}"), 5, 128))
    for model, T, G in cases:
        err = bispec.correspondence_check(model, G, T, field=bispec.analytic_bispectrum(model, G))
        if err > worst or not where:
            worst, where = err, model.identifier
    return CheckResult("correspondence_check", worst <= tol, worst, tol, f"{len(cases)} models; worst {where}")


def _check_triple_product(rng, tol, trials=100, G=64):
    ones = np.ones(G)
    const = bispec.triple_product_bound_check(ones, ones, ones)
    equality = abs(const.left - const.right) / const.right
    failures = 0
    for _ in range(trials):
        psis = [transfer_function_grid(random_filter(rng), G) for _ in range(3)]
        if not bispec.triple_product_bound_check(*psis).holds:
            failures += 1
    ok = failures == 0 and equality <= tol
    return CheckResult(
        "triple_product_bound", ok, equality, tol, f"{trials - failures}/{trials} trials hold; constant-case gap {equality:.3g}"
    )


def run_battery(n_random=500, seed=1, grid=128, n_correspondence=50, n_symmetric=100, extra_models=(),
                tolerances=None):
    """Run every check; returns a list of :class:`CheckResult`."""
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    rng = np.random.default_rng(seed)
    results = [
        _check_correspondence(rng, tol["correspondence"], n_correspondence, extra_models),
        _check_triple_product(rng, tol["triple_product"]),
    ]

    exp1 = InnovationSpec.centered_exponential(1.0)
    randoms = [LinearModel(random_filter(rng), exp1) for _ in range(n_random)]
    symmetric = [LinearModel(random_symmetric_filter(rng), exp1) for _ in range(n_symmetric)]

    # pathway agreement and the realness <=> symmetry equivalence
    clashes, misclassified, below_gap, reports = 0, 0, 0, {}
    worst_sym, min_asym = 0.0, math.inf
    for m in randoms + symmetric:
        try:
            rep = diagnose_model(m, grid, realness_tol=tol["realness"])
        except InternalInconsistencyError:
            clashes += 1
            continue
        reports[id(m)] = rep
        is_sym = classify_symmetry(m.filter).kind == "symmetric"
        if is_sym:
            worst_sym = max(worst_sym, rep.realness)
            misclassified += rep.realness > tol["realness"]
        else:
            misclassified += rep.realness <= tol["realness"]
            if rep.spectrum_min > 1e-6:
                below_gap += rep.realness < tol["realness_gap"]
                min_asym = min(min_asym, rep.realness)
    total = len(randoms) + len(symmetric)
    results.append(
        CheckResult("pathway_agreement", clashes == 0, float(clashes), 0.0, f"{total - clashes}/{total} agree")
    )
    results.append(
        CheckResult(
            "realness_symmetry",
            misclassified == 0,
            worst_sym,
            tol["realness"],
            f"{misclassified} misclassified; min non-symmetric realness {min_asym:.3g}, "
            f"{below_gap} nearly symmetric below {tol['realness_gap']}",
        )
    )

    # phase slope against coefficient symmetry, plus the cocycle
    worst_res, worst_cocycle, mismatches = 0.0, 0.0, 0
    for m in symmetric:
        f = m.filter
        ph = extract_phase(f, 256, 1e-6)
        dec = fit_half_integer_slope(ph, _max_phase_n(f))
        worst_res = max(worst_res, dec.residual)
        worst_cocycle = max(worst_cocycle, cocycle_residual(ph))
        if symmetry_index_from_phase(dec, 1e-6) != classify_symmetry(f).index:
            mismatches += 1
    for _ in range(n_symmetric // 4):
        f = random_skew_symmetric_filter(rng)
        dec = fit_half_integer_slope(extract_phase(f, 256, 1e-6), _max_phase_n(f), offset=math.pi / 2)
        worst_res = max(worst_res, dec.residual)
        if symmetry_index_from_phase(dec, 1e-6) != classify_symmetry(f).index:
            mismatches += 1
    results.append(
        CheckResult(
            "phase_symmetry",
            mismatches == 0 and worst_res <= tol["phase_residual"],
            worst_res,
            tol["phase_residual"],
            f"{mismatches} index mismatches",
        )
    )
    asym = cocycle_residual(extract_phase(FilterCoefficients(0, (1.0, 0.5)), 64, 1e-6))
    results.append(
        CheckResult(
            "cocycle",
            worst_cocycle <= tol["cocycle"] and asym > tol["cocycle_asymmetric"],
            worst_cocycle,
            tol["cocycle"],
            f"c=[1,0.5] residual {asym:.4f} (must exceed {tol['cocycle_asymmetric']})",
        )
    )

    # third-order reversibility against the reversibility verdict
    disagreements, checked = 0, 0
    for m in randoms:
        rep = reports.get(id(m))
        if rep is None:
            continue
        chk = third_order_reversibility_check(m, m.filter.width)
        if not chk.skewed:
            continue
        checked += 1
        if chk.consistent != (rep.reversible == YES):
            disagreements += 1
    results.append(
        CheckResult(
            "third_order_equivalence", disagreements == 0, float(disagreements), 0.0, f"{checked - disagreements}/{checked} agree"
        )
    )

    # time reversal conjugates the field and keeps the verdict
    worst_conj, flips = 0.0, 0
    for m in randoms[:50]:
        r = reverse_model(m)
        a = bispec.analytic_bispectrum(m, grid).values
        b = bispec.analytic_bispectrum(r, grid).values
        scale = max(1.0, float(np.abs(a).max()))
        worst_conj = max(worst_conj, float(np.abs(b - np.conj(a)).max()) / scale)
        if diagnose_model(r, grid).reversible != reports[id(m)].reversible:
            flips += 1
        d1 = third_order_symmetry_defect(model_cumulant_table(m, m.filter.width))
        d2 = third_order_symmetry_defect(model_cumulant_table(r, m.filter.width))
        flips += abs(d1 - d2) > 1e-12
    results.append(
        CheckResult(
            "time_reversal", flips == 0 and worst_conj <= tol["reversal"], worst_conj, tol["reversal"], f"{flips} verdict changes"
        )
    )
    return results


def format_results(results):
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{status} {r.name}: measured={r.measured!r} tolerance={r.tolerance!r} {r.detail}".rstrip())
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} checks passed")
    return "\n".join(lines) + "\n"
