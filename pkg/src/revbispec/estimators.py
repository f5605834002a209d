"""scikit-learn compatible wrappers around the series-facing API.

Estimators follow the usual conventions: hyperparameters are stored
verbatim in ``__init__``, everything learned ends in an underscore, and
``get_params``/``set_params``/``clone`` work, so the wrappers drop into
pipelines and grid searches.

A single series is passed as a 1-D array (or an ``(n, 1)`` column). Batches
of equal-length series are 2-D arrays with one series per row.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_series, check_series_batch
from .bispec import EstimationPlan, estimate_bispectrum, estimate_spectrum, realness_statistic
from .diagnose import calibrate_null, diagnose_series
from .linmodel import TimeSeriesSample

__all__ = ["BispectrumEstimator", "RealnessFeatures", "ReversibilityDiagnostic"]


def _plan(n, segment_len, n_segments, taper):
    if n_segments is None:
        return EstimationPlan.for_length(n, segment_len, taper)
    return EstimationPlan(segment_len, n_segments, taper)


class BispectrumEstimator(BaseEstimator):
    """Averaged-biperiodogram bispectrum of one series.

    Parameters
    ----------
    segment_len : int, default=128
        Segment length ``L``; also the grid size of the estimate. Must be even.
    n_segments : int or None, default=None
        Number of non-overlapping segments. None uses every whole segment.
    taper : {"none", "hann"}, default="none"
    spectrum_floor : float, default=1e-3
        Relative magnitude floor used by ``realness_``.

    Attributes
    ----------
    plan_ : EstimationPlan
    field_ : BifrequencyField
    spectrum_ : ndarray of shape (segment_len,)
        Averaged periodogram on the same grid.
    realness_ : float
    frequencies_ : ndarray of shape (segment_len,)
    """

    def __init__(self, segment_len=128, n_segments=None, taper="none", spectrum_floor=1e-3):
        self.segment_len = segment_len
        self.n_segments = n_segments
        self.taper = taper
        self.spectrum_floor = spectrum_floor

    def fit(self, X, y=None):
        x = check_series(X, min_length=self.segment_len)
        self.plan_ = _plan(x.shape[0], self.segment_len, self.n_segments, self.taper)
        sample = TimeSeriesSample(x)
        self.field_ = estimate_bispectrum(sample, self.plan_)
        self.spectrum_ = estimate_spectrum(sample, self.plan_)
        self.realness_ = realness_statistic(self.field_, self.spectrum_floor)
        self.frequencies_ = self.field_.omegas
        self.n_features_in_ = 1
        return self


class RealnessFeatures(TransformerMixin, BaseEstimator):
    """Per-series bispectral features.

    ``transform`` maps each row of ``X`` to three columns: the realness
    statistic, the mean absolute bispectrum value, and the sample skewness.
    The transformer is stateless; ``fit`` only validates and records the
    input width.
    """

    def __init__(self, segment_len=64, taper="none", spectrum_floor=1e-3):
        self.segment_len = segment_len
        self.taper = taper
        self.spectrum_floor = spectrum_floor

    def fit(self, X, y=None):
        X = check_series_batch(X, min_length=self.segment_len)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_series_batch(X, min_length=self.segment_len)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} time points, transformer was fitted with {self.n_features_in_}")
        plan = EstimationPlan.for_length(X.shape[1], self.segment_len, self.taper)
        out = np.empty((X.shape[0], 3))
        for i, row in enumerate(X):
            field = estimate_bispectrum(row, plan)
            y = row - row.mean()
            var = np.mean(y ** 2)
            out[i, 0] = realness_statistic(field, self.spectrum_floor)
            out[i, 1] = field.l1_norm() / field.grid_size ** 2
            out[i, 2] = np.mean(y ** 3) / var ** 1.5 if var > 0 else 0.0
        return out

    def get_feature_names_out(self, input_features=None):
        return np.array(["realness", "bispectrum_mean_abs", "skewness"], dtype=object)


class ReversibilityDiagnostic(BaseEstimator):
    """Null-calibrated reversibility verdicts for observed series.

    ``fit`` calibrates the realness threshold and the bispectrum noise
    floor on surrogates matched to the training series (unless given
    explicitly) and stores the training report. ``predict`` returns one
    verdict string (``"yes"``, ``"no"`` or ``"undetermined"``) per series,
    reusing the fitted thresholds.

    Parameters
    ----------
    segment_len, n_segments, taper
        Estimation plan, as in :class:`BispectrumEstimator`.
    realness_threshold : float or None
        Fixed threshold; None calibrates it.
    spectrum_floor : float, default=1e-3
    n_calibration : int, default=10
        Surrogate replicates per null family.
    random_state : int, default=0
        Seed of the first surrogate.
    """

    def __init__(self, segment_len=128, n_segments=None, taper="none", realness_threshold=None,
                 spectrum_floor=1e-3, n_calibration=10, random_state=0):
        self.segment_len = segment_len
        self.n_segments = n_segments
        self.taper = taper
        self.realness_threshold = realness_threshold
        self.spectrum_floor = spectrum_floor
        self.n_calibration = n_calibration
        self.random_state = random_state

    def fit(self, X, y=None):
        x = check_series(X, min_length=self.segment_len)
        self.plan_ = _plan(x.shape[0], self.segment_len, self.n_segments, self.taper)
        cal = calibrate_null(x, self.plan_, self.spectrum_floor, self.n_calibration, self.random_state)
        self.calibration_ = cal
        self.realness_threshold_ = (
            cal.realness_threshold if self.realness_threshold is None else float(self.realness_threshold)
        )
        self.norm_floor_ = cal.norm_floor
        self.report_ = self._report(x)
        self.n_features_in_ = 1
        return self

    def _report(self, x):
        return diagnose_series(
            TimeSeriesSample(x),
            self.plan_,
            realness_threshold=self.realness_threshold_,
            spectrum_floor=self.spectrum_floor,
            norm_floor=self.norm_floor_,
        )

    def predict(self, X):
        check_is_fitted(self, "report_")
        X = np.asarray(X, dtype=float)
        rows = [X] if X.ndim == 1 else list(check_series_batch(X, min_length=self.segment_len))
        return np.array([self._report(check_series(r)).reversible for r in rows], dtype=object)
