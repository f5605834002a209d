"""Reversibility and causality verdicts from bispectral evidence.

Two independent routes decide reversibility of a linear model:

* the bispectrum route: a nonzero real bispectrum with a.e. positive
  spectrum implies reversibility, and a bispectrum that is not real rules
  it out (reversibility forces real polyspectra);
* the coefficient route: with positive spectrum, a linear process is
  reversible iff its coefficients are symmetric about some index, or
  skew-symmetric with symmetrically distributed innovations.

Verdicts are three-valued. A route whose hypotheses fail says
``undetermined`` rather than guessing, and a yes/no clash between the two
routes raises :class:`InternalInconsistencyError`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from ._validation import check_positive_int, check_series
from .bispec import (
    analytic_bispectrum,
    estimate_bispectrum,
    estimate_spectrum,
    realness_statistic,
)
from .cumulant import model_cumulant_table, sample_cumulant, third_order_symmetry_defect
from .exceptions import GridTooCoarseError, InsufficientLengthError, InternalInconsistencyError
from .linmodel import (
    FilterCoefficients,
    InnovationSpec,
    LinearModel,
    classify_symmetry,
    simulate,
    transfer_function_grid,
)
from .phase import extract_phase, fit_phase, symmetry_index_from_phase

__all__ = [
    "DiagnosticReport",
    "CausalityVerdict",
    "ThirdOrderCheck",
    "NullCalibration",
    "diagnose_model",
    "diagnose_series",
    "calibrate_null",
    "causality_verdict",
    "third_order_reversibility_check",
    "empirical_reversibility_probe",
    "reversibility_probe_gaps",
]

YES, NO, UNDETERMINED = "yes", "no", "undetermined"

CAVEAT_ZERO_BISPECTRUM = "bispectrum a.e. zero"
CAVEAT_ZERO_SKEWNESS = "skewness zero: third-order criterion silent"
CAVEAT_BOUNDARY = "finite-symmetric-filter boundary case"
CAVEAT_LINEARITY = "linearity assumed, not tested"
CAVEAT_UNMATCHED_SKEW = "null calibration could not match sample skewness"
CAVEAT_SPECTRUM = "spectrum not a.e. positive on grid"

# (attribute, nested path) in serialisation order
_LAYOUT = (
    ("source", ("source",)),
    ("subject", ("subject",)),
    ("grid_size", ("grid_size",)),
    ("spectrum_positive", ("spectrum", "positive")),
    ("spectrum_min", ("spectrum", "min")),
    ("spectrum_zero_count", ("spectrum", "zero_count")),
    ("bispectrum_nonzero", ("bispectrum", "nonzero")),
    ("field_norm", ("bispectrum", "l1_norm")),
    ("field_norm_floor", ("bispectrum", "norm_floor")),
    ("realness", ("realness", "statistic")),
    ("realness_threshold", ("realness", "threshold")),
    ("bispectrum_real", ("realness", "real")),
    ("phase_n", ("phase_fit", "n")),
    ("phase_offset", ("phase_fit", "offset")),
    ("phase_residual", ("phase_fit", "residual")),
    ("phase_index", ("phase_fit", "index")),
    ("symmetry", ("symmetry", "kind")),
    ("symmetry_index", ("symmetry", "index")),
    ("innovations_symmetric", ("symmetry", "innovations_symmetric")),
    ("third_cumulant", ("third_cumulant",)),
    ("bispectrum_pathway", ("pathways", "bispectrum")),
    ("coefficient_pathway", ("pathways", "coefficients")),
    ("reversible", ("verdicts", "reversible")),
    ("causal_linear_possible", ("verdicts", "causal_linear_possible")),
    ("caveats", ("caveats",)),
)


@dataclass(frozen=True)
class DiagnosticReport:
    """Hypotheses, measured evidence and verdicts for one model or series.

    Fields that only make sense for a known model (phase fit, coefficient
    symmetry) are None for series.
    """

    source: str
    subject: str
    grid_size: int
    spectrum_positive: bool
    spectrum_min: float
    spectrum_zero_count: int
    bispectrum_nonzero: bool
    field_norm: float
    field_norm_floor: float
    realness: float
    realness_threshold: float
    bispectrum_real: bool
    phase_n: int | None
    phase_offset: float | None
    phase_residual: float | None
    phase_index: int | None
    symmetry: str | None
    symmetry_index: int | None
    innovations_symmetric: bool | None
    third_cumulant: float
    bispectrum_pathway: str
    coefficient_pathway: str
    reversible: str
    causal_linear_possible: str
    caveats: tuple = ()

    def to_dict(self):
        out = {}
        for attr, path in _LAYOUT:
            node = out
            for key in path[:-1]:
                node = node.setdefault(key, {})
            value = getattr(self, attr)
            node[path[-1]] = list(value) if attr == "caveats" else value
        return out

    @classmethod
    def from_dict(cls, doc):
        kwargs = {}
        for attr, path in _LAYOUT:
            node = doc
            for key in path:
                node = node[key]
            kwargs[attr] = tuple(node) if attr == "caveats" else node
        return cls(**kwargs)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_text(self):
        """``dotted.key: value`` lines in fixed order; values are JSON literals."""
        lines = []
        for attr, path in _LAYOUT:
            value = getattr(self, attr)
            if attr == "caveats":
                value = list(value)
            lines.append(f"{'.'.join(path)}: {json.dumps(value)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        by_path = {".".join(p): a for a, p in _LAYOUT}
        kwargs = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            key, _, raw = line.partition(": ")
            attr = by_path[key]
            value = json.loads(raw)
            kwargs[attr] = tuple(value) if attr == "caveats" else value
        return cls(**kwargs)


class CausalityVerdict(NamedTuple):
    verdict: str  # "no_causal_representation", "possible" or "undetermined"
    caveats: tuple = ()


class ThirdOrderCheck(NamedTuple):
    consistent: bool
    defect: float
    skewed: bool
    caveats: tuple = ()


class NullCalibration(NamedTuple):
    realness_threshold: float
    norm_floor: float
    realness_samples: tuple
    norm_samples: tuple
    caveats: tuple = ()


def causality_verdict(report):
    """Whether a causal linear representation is excluded.

    A nonzero real bispectrum with a.e. positive spectrum excludes a causal
    linear representation; the finite symmetric causal filters (such as
    ``c = [1, 2, 1]`` at ``k_min = 0``) sit on the boundary of that claim,
    so the exclusion always carries the boundary-case caveat.
    """
    if report.bispectrum_nonzero and not report.bispectrum_real:
        return CausalityVerdict("possible")
    if report.spectrum_positive and report.bispectrum_nonzero and report.bispectrum_real:
        return CausalityVerdict("no_causal_representation", (CAVEAT_BOUNDARY,))
    return CausalityVerdict("undetermined")


_CAUSAL_FIELD = {"no_causal_representation": NO, "possible": YES, "undetermined": UNDETERMINED}


def _combine(bispectrum_pathway, coefficient_pathway):
    votes = {bispectrum_pathway, coefficient_pathway}
    if YES in votes and NO in votes:
        raise InternalInconsistencyError(
            f"internal inconsistency: bispectrum route says {bispectrum_pathway}, "
            f"coefficient route says {coefficient_pathway}"
        )
    if YES in votes:
        return YES
    if NO in votes:
        return NO
    return UNDETERMINED


def _bispectrum_pathway(nonzero, real, spectrum_positive):
    if not nonzero:
        return UNDETERMINED
    if not real:
        return NO
    return YES if spectrum_positive else UNDETERMINED


def _finish(report):
    causal = causality_verdict(report)
    caveats = list(report.caveats)
    for flag in causal.caveats:
        if flag not in caveats:
            caveats.append(flag)
    return replace(
        report,
        causal_linear_possible=_CAUSAL_FIELD[causal.verdict],
        caveats=tuple(caveats),
    )


def diagnose_model(model, G, realness_tol=1e-9, spectrum_floor=1e-3, phase_floor=1e-6,
                   phase_residual_tol=1e-6):
    """Analytic diagnostics for a known linear model on a ``G x G`` grid.

    The a.e.-positive-spectrum hypothesis is checked by allowing at most
    ``width`` grid points with ``S <= 1e-12 * max S``; the nonzero
    hypothesis by ``sum |B| > 1e-12 * G^2``.
    """
    G = check_positive_int(G, "G")
    f = model.filter
    need = 8 * (f.width + 2)
    if G < need:
        raise GridTooCoarseError(f"grid too coarse: G={G} but diagnostics need G >= 8*(width + 2) = {need}")

    field = analytic_bispectrum(model, G)
    norm = field.l1_norm()
    norm_floor = 1e-12 * G * G
    nonzero = norm > norm_floor
    realness = realness_statistic(field, spectrum_floor)
    real = realness <= realness_tol

    S = np.abs(transfer_function_grid(f, G)) ** 2
    zero_count = int(np.count_nonzero(S <= 1e-12 * S.max()))
    positive = zero_count <= f.width

    phase = extract_phase(f, G, phase_floor)
    n_max = max(f.width, 2 * max(abs(f.k_min), abs(f.k_max)))
    decomp = fit_phase(phase, n_max)
    phase_index = symmetry_index_from_phase(decomp, phase_residual_tol)

    sym = classify_symmetry(f)
    innov_sym = model.innovations.is_symmetric
    if not positive:
        coeff = UNDETERMINED
    elif sym.kind == "symmetric" or (sym.kind == "skew_symmetric" and innov_sym):
        coeff = YES
    elif model.innovations.kind == "gaussian":
        # the "only if" half needs non-Gaussian noise: Gaussian processes are always reversible
        coeff = UNDETERMINED
    else:
        coeff = NO

    bisp = _bispectrum_pathway(nonzero, real, positive)
    reversible = _combine(bisp, coeff)

    cum3_x = model.cum3_x
    caveats = []
    if not nonzero:
        caveats.append(CAVEAT_ZERO_BISPECTRUM)
    if not positive:
        caveats.append(CAVEAT_SPECTRUM)
    if abs(cum3_x) <= 1e-12 * max(1.0, abs(model.innovations.cum3)):
        caveats.append(CAVEAT_ZERO_SKEWNESS)

    report = DiagnosticReport(
        source="model",
        subject=model.identifier,
        grid_size=G,
        spectrum_positive=positive,
        spectrum_min=float(S.min()),
        spectrum_zero_count=zero_count,
        bispectrum_nonzero=nonzero,
        field_norm=norm,
        field_norm_floor=norm_floor,
        realness=realness,
        realness_threshold=realness_tol,
        bispectrum_real=real,
        phase_n=decomp.n,
        phase_offset=decomp.offset,
        phase_residual=decomp.residual,
        phase_index=phase_index,
        symmetry=sym.kind,
        symmetry_index=sym.index,
        innovations_symmetric=innov_sym,
        third_cumulant=cum3_x,
        bispectrum_pathway=bisp,
        coefficient_pathway=coeff,
        reversible=reversible,
        causal_linear_possible=UNDETERMINED,
        caveats=tuple(caveats),
    )
    return _finish(report)


def _zero_phase_filter(power):
    # real even filter whose squared gain matches the estimated spectrum
    L = power.size
    s = power.copy()
    s[0] = s[1]  # bin 0 is empty after mean removal
    h = np.real(np.fft.ifft(np.sqrt(np.maximum(s, 0.0))))
    half = L // 2 - 1
    vals = np.concatenate([h[-half:], h[: half + 1]])
    vals = 0.5 * (vals + vals[::-1])
    return FilterCoefficients.trimmed(vals, k_min=-half)


def _sample_skewness(x):
    y = x - x.mean()
    var = float(np.mean(y ** 2))
    if var == 0.0:
        return 0.0
    return float(np.mean(y ** 3)) / var ** 1.5


def calibrate_null(series, plan, spectrum_floor=1e-3, n_replicates=10, seed=0, noise_z=5.0,
                   quantile_z=2.3263478740408408):
    """Null distributions for the series diagnostics by surrogate simulation.

    A zero-phase (hence symmetric, reversible) filter is built from the
    estimated spectrum. Gaussian surrogates through it give the noise floor
    for the field norm (``mean + noise_z * sd``); surrogates with gamma
    innovations whose skewness reproduces the sample skewness give the
    realness threshold, the normal-approximation 99th percentile
    ``mean + quantile_z * sd``.
    """
    x = check_series(getattr(series, "values", series))
    n_replicates = check_positive_int(n_replicates, "n_replicates", minimum=2)
    n = plan.required_length
    power = estimate_spectrum(x, plan)
    caveats = []
    if not np.any(power > 0):
        # a constant series has no spectrum to match; nothing can exceed a zero floor
        return NullCalibration(0.0, 0.0, (), (), ())
    h = _zero_phase_filter(power)
    c = h.array
    gamma_x = _sample_skewness(x[:n])
    s3 = float(np.sum(c ** 3))
    gamma_z = gamma_x * float(np.sum(c ** 2)) ** 1.5 / s3 if s3 != 0.0 else math.nan
    if math.isfinite(gamma_z) and 1e-3 < abs(gamma_z) < 100.0:
        shape = 4.0 / gamma_z ** 2
        skewed = InnovationSpec.centered_gamma(shape, 1.0 / math.sqrt(shape), math.copysign(1.0, gamma_z))
    else:
        skewed = InnovationSpec.centered_exponential()
        caveats.append(CAVEAT_UNMATCHED_SKEW)
    gauss_model = LinearModel(h, InnovationSpec.gaussian(), "null:gaussian")
    skew_model = LinearModel(h, skewed, "null:skewed")

    norms, reals = [], []
    for r in range(n_replicates):
        g = estimate_bispectrum(simulate(gauss_model, n, seed + 2 * r), plan)
        norms.append(g.l1_norm())
        s = estimate_bispectrum(simulate(skew_model, n, seed + 2 * r + 1), plan)
        reals.append(realness_statistic(s, spectrum_floor))
    norms_a, reals_a = np.array(norms), np.array(reals)
    floor = float(norms_a.mean() + noise_z * norms_a.std(ddof=1))
    threshold = float(reals_a.mean() + quantile_z * reals_a.std(ddof=1))
    return NullCalibration(threshold, floor, tuple(reals), tuple(norms), tuple(caveats))


def diagnose_series(series, plan, realness_threshold=None, spectrum_floor=1e-3, norm_floor=None,
                    n_calibration=10, calibration_seed=0):
    """Diagnostics for an observed series via the averaged biperiodogram.

    Thresholds not supplied are obtained from :func:`calibrate_null`.
    Linearity cannot be checked from data and is assumed; the coefficient
    route is therefore always undetermined here.
    """
    x = check_series(getattr(series, "values", series))
    plan.check(x.shape[0])
    field = estimate_bispectrum(series, plan)
    power = estimate_spectrum(series, plan)

    caveats = [CAVEAT_LINEARITY]
    if realness_threshold is None or norm_floor is None:
        cal = calibrate_null(x, plan, spectrum_floor, n_calibration, calibration_seed)
        if realness_threshold is None:
            realness_threshold = cal.realness_threshold
        if norm_floor is None:
            norm_floor = cal.norm_floor
        caveats.extend(cal.caveats)

    norm = field.l1_norm()
    nonzero = norm > norm_floor
    realness = realness_statistic(field, spectrum_floor)
    real = realness <= realness_threshold

    inner = power[1:]
    top = float(inner.max()) if inner.size else 0.0
    zero_count = int(np.count_nonzero(inner <= 1e-12 * top)) if top > 0 else inner.size
    positive = top > 0 and zero_count <= 1

    bisp = _bispectrum_pathway(nonzero, real, positive)
    if not nonzero:
        caveats.append(CAVEAT_ZERO_BISPECTRUM)
    if not positive:
        caveats.append(CAVEAT_SPECTRUM)
    cum3 = sample_cumulant(x, 0, 0)
    if cum3 == 0.0:
        caveats.append(CAVEAT_ZERO_SKEWNESS)

    report = DiagnosticReport(
        source="series",
        subject=str(getattr(series, "provenance", "array")),
        grid_size=plan.segment_len,
        spectrum_positive=bool(positive),
        spectrum_min=float(inner.min()) if inner.size else 0.0,
        spectrum_zero_count=zero_count,
        bispectrum_nonzero=bool(nonzero),
        field_norm=norm,
        field_norm_floor=float(norm_floor),
        realness=realness,
        realness_threshold=float(realness_threshold),
        bispectrum_real=bool(real),
        phase_n=None,
        phase_offset=None,
        phase_residual=None,
        phase_index=None,
        symmetry=None,
        symmetry_index=None,
        innovations_symmetric=None,
        third_cumulant=cum3,
        bispectrum_pathway=bisp,
        coefficient_pathway=UNDETERMINED,
        reversible=bisp,
        causal_linear_possible=UNDETERMINED,
        caveats=tuple(caveats),
    )
    return _finish(report)


def third_order_reversibility_check(model, T, tol=1e-9):
    """Compare the cumulant table with its lag-negated copy.

    ``consistent`` means ``cum(0, t1, t2) == cum(0, -t1, -t2)`` over
    ``[-T, T]^2`` within ``tol``. For a model with nonzero third cumulant
    of ``X(0)`` this coincides with full reversibility; with zero skewness
    the check says nothing about it and ``skewed`` is False.
    """
    T = check_positive_int(T, "T")
    if T < model.filter.width:
        raise ValueError(f"T={T} must be at least the filter width {model.filter.width}")
    defect = third_order_symmetry_defect(model_cumulant_table(model, T))
    skewed = abs(model.cum3_x) > 1e-12 * max(1.0, abs(model.innovations.cum3))
    caveats = () if skewed else (CAVEAT_ZERO_SKEWNESS,)
    return ThirdOrderCheck(defect <= tol, defect, skewed, caveats)


def reversibility_probe_gaps(series, max_lag):
    """``mean(x_t^2 x_{t+h}) - mean(x_t x_{t+h}^2)`` for ``h = 1..max_lag``.

    The series is mean-removed first. Each moment is averaged over the
    ``N - h`` available products.
    """
    max_lag = check_positive_int(max_lag, "max_lag")
    x = check_series(getattr(series, "values", series))
    n = x.shape[0]
    if max_lag >= n / 10:
        raise InsufficientLengthError(f"insufficient length: max_lag={max_lag} needs max_lag < N/10 = {n / 10}")
    y = x - x.mean()
    gaps = np.empty(max_lag)
    for h in range(1, max_lag + 1):
        a, b = y[:-h], y[h:]
        gaps[h - 1] = np.mean(a * a * b) - np.mean(a * b * b)
    return gaps


def empirical_reversibility_probe(series, max_lag):
    """Largest absolute gap from :func:`reversibility_probe_gaps`."""
    return float(np.max(np.abs(reversibility_probe_gaps(series, max_lag))))
