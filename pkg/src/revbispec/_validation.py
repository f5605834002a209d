"""Input validation helpers shared by the functional API and the estimators."""

import numbers

import numpy as np
from sklearn.utils import check_array

from .exceptions import InsufficientLengthError


def check_positive_int(value, name, minimum=1):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_nonnegative(value, name):
    value = float(value)
    if not np.isfinite(value) or value < 0:
        raise ValueError(f"{name} must be a finite nonnegative number, got {value}")
    return value


def check_series(x, min_length=1, name="series"):
    """Return ``x`` as a finite 1-D float64 array.

    A single-column 2-D array is accepted and flattened, so that column
    vectors coming out of pandas or sklearn pipelines work unchanged.
    """
    arr = np.asarray(x)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    arr = check_array(arr, ensure_2d=False, dtype=np.float64, ensure_min_samples=0)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.shape[0] < min_length:
        raise InsufficientLengthError(
            f"insufficient length: {name} has {arr.shape[0]} values, need at least {min_length}"
        )
    return arr


def check_series_batch(X, min_length=1):
    """Validate a batch of equal-length series, one per row."""
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] < min_length:
        raise InsufficientLengthError(
            f"insufficient length: series have {X.shape[1]} values, need at least {min_length}"
        )
    return X
