"""Third-order joint cumulants ``cum(X(0), X(t1), X(t2))``.

Exact values for finite linear models come from the triple-product sum
``cum3(Z) * sum_k c(k) c(k+t1) c(k+t2)``; sample values use the plain
moment estimator on a mean-removed series.

All lag pairs are first reduced to a canonical ``0 <= p <= q`` by sorting
the three time points ``{0, t1, t2}`` and shifting the smallest to zero.
Both table symmetries (argument swap and stationarity shift) therefore
hold exactly, not just to rounding.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from ._validation import check_positive_int, check_series
from .exceptions import InsufficientLengthError

__all__ = [
    "CumulantTable",
    "canonical_lags",
    "model_cumulant",
    "model_cumulant_table",
    "sample_cumulant",
    "sample_cumulant_table",
    "third_order_symmetry_defect",
]


def canonical_lags(t1, t2):
    """Map ``(t1, t2)`` to the equivalent ``(p, q)`` with ``0 <= p <= q``."""
    a, b, c = sorted((0, int(t1), int(t2)))
    return b - a, c - a


@dataclass(frozen=True, eq=False)
class CumulantTable:
    """``cum(X(0), X(t1), X(t2))`` for ``t1, t2`` in ``[-T, T]``.

    ``values[t1 + T, t2 + T]`` holds the entry for ``(t1, t2)``.
    """

    max_lag: int
    values: np.ndarray

    def __post_init__(self):
        T = check_positive_int(self.max_lag, "max_lag")
        arr = np.array(self.values, dtype=float)
        if arr.shape != (2 * T + 1, 2 * T + 1):
            raise ValueError(f"table shape {arr.shape} does not match max_lag={T}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def lags(self):
        return np.arange(-self.max_lag, self.max_lag + 1)

    def value(self, t1, t2):
        T = self.max_lag
        if abs(t1) > T or abs(t2) > T:
            raise KeyError(f"lag ({t1}, {t2}) outside table range [-{T}, {T}]")
        return float(self.values[t1 + T, t2 + T])

    def __eq__(self, other):
        if not isinstance(other, CumulantTable):
            return NotImplemented
        return self.max_lag == other.max_lag and np.array_equal(self.values, other.values)

    def to_csv(self):
        buf = io.StringIO()
        buf.write("t1,t2,value\n")
        for i, t1 in enumerate(self.lags):
            for j, t2 in enumerate(self.lags):
                buf.write(f"{t1},{t2},{float(self.values[i, j])!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        if not lines or lines[0].strip() != "t1,t2,value":
            raise ValueError("expected header 't1,t2,value'")
        rows = [ln.split(",") for ln in lines[1:]]
        T = max(abs(int(r[0])) for r in rows)
        vals = np.zeros((2 * T + 1, 2 * T + 1))
        for t1, t2, v in rows:
            vals[int(t1) + T, int(t2) + T] = float(v)
        return cls(T, vals)


def _triple_sum(c, p, q):
    # sum_j c[j] c[j+p] c[j+q] for 0 <= p <= q
    m = c.size - q
    if m <= 0:
        return 0.0
    return float(np.sum(c[:m] * c[p:p + m] * c[q:q + m]))


def model_cumulant(model, t1, t2):
    """Exact ``cum(X(0), X(t1), X(t2))``; zero when the shifted supports miss."""
    p, q = canonical_lags(t1, t2)
    cum3 = model.innovations.cum3
    if cum3 == 0.0:
        return 0.0
    return cum3 * _triple_sum(model.filter.array, p, q)


def model_cumulant_table(model, T):
    T = check_positive_int(T, "T")
    lags = range(-T, T + 1)
    cache = {}
    vals = np.empty((2 * T + 1, 2 * T + 1))
    for i, t1 in enumerate(lags):
        for j, t2 in enumerate(lags):
            key = canonical_lags(t1, t2)
            if key not in cache:
                cache[key] = model_cumulant(model, *key)
            vals[i, j] = cache[key]
    return CumulantTable(T, vals)


def _sample_values(series):
    values = getattr(series, "values", series)
    return check_series(values)


def sample_cumulant(series, t1, t2):
    """Moment estimate of ``cum(X(0), X(t1), X(t2))`` for ``0 <= t1 <= t2``.

    Normalised by the number of products, ``N - t2``, after subtracting
    the sample mean.
    """
    x = _sample_values(series)
    if not 0 <= t1 <= t2:
        raise ValueError(f"lags must satisfy 0 <= t1 <= t2, got ({t1}, {t2})")
    n = x.shape[0]
    if t2 >= n:
        raise InsufficientLengthError(f"insufficient length: lag {t2} needs more than {n} values")
    y = x - x.mean()
    m = n - t2
    return float(np.dot(y[:m] * y[t1:t1 + m], y[t2:t2 + m]) / m)


def sample_cumulant_table(series, T):
    """Sample table over ``[-T, T]^2``; canonical lags reach ``2T``."""
    T = check_positive_int(T, "T")
    x = _sample_values(series)
    if 2 * T >= x.shape[0]:
        raise InsufficientLengthError(
            f"insufficient length: a table with max_lag={T} needs more than {2 * T} values"
        )
    cache = {}
    vals = np.empty((2 * T + 1, 2 * T + 1))
    for i, t1 in enumerate(range(-T, T + 1)):
        for j, t2 in enumerate(range(-T, T + 1)):
            key = canonical_lags(t1, t2)
            if key not in cache:
                cache[key] = sample_cumulant(x, *key)
            vals[i, j] = cache[key]
    return CumulantTable(T, vals)


def third_order_symmetry_defect(table):
    """``max |cum(0, t1, t2) - cum(0, -t1, -t2)|`` over the table."""
    v = table.values
    return float(np.max(np.abs(v - v[::-1, ::-1])))
