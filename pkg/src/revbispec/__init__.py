"""Bispectral diagnostics of time reversibility for linear time series.

The package works on finite moving-average models ``X(t) = sum c(k) Z(t-k)``
and on observed series. The main entry points are

* :func:`diagnose_model` and :func:`diagnose_series` for verdicts,
* :func:`analytic_bispectrum` and :func:`estimate_bispectrum` for fields,
* :func:`model_cumulant_table` and :func:`sample_cumulant_table` for
  third-order cumulants,
* the scikit-learn style wrappers in :mod:`revbispec.estimators`.
"""

__version__ = "0.1.0"

from .bispec import (
    BifrequencyField,
    EstimationPlan,
    analytic_bispectrum,
    correspondence_check,
    estimate_bispectrum,
    estimate_spectrum,
    realness_statistic,
    triple_product_bound_check,
)
from .cumulant import (
    CumulantTable,
    model_cumulant,
    model_cumulant_table,
    sample_cumulant,
    sample_cumulant_table,
    third_order_symmetry_defect,
)
from .diagnose import (
    DiagnosticReport,
    calibrate_null,
    causality_verdict,
    diagnose_model,
    diagnose_series,
    empirical_reversibility_probe,
    third_order_reversibility_check,
)
from .estimators import BispectrumEstimator, RealnessFeatures, ReversibilityDiagnostic
from .exceptions import (
    GridTooCoarseError,
    InsufficientGridError,
    InsufficientLengthError,
    InternalInconsistencyError,
    ModelFileError,
)
from .linmodel import (
    FilterCoefficients,
    InnovationSpec,
    LinearModel,
    TimeSeriesSample,
    classify_symmetry,
    reverse_model,
    simulate,
    spectrum,
    transfer_function,
    transfer_function_grid,
)
from .phase import (
    PhaseDecomposition,
    PhaseFunction,
    cocycle_residual,
    extract_phase,
    fit_half_integer_slope,
    fit_phase,
    symmetry_index_from_phase,
)

__all__ = [name for name in dir() if not name.startswith("_")]
