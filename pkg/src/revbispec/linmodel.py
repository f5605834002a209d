"""Finite moving-average models with i.i.d. innovations.

A model is ``X(t) = sum_k c(k) Z(t - k)`` where ``c`` has tight finite
support ``[k_min, k_max]`` and ``Z`` is centered i.i.d. noise drawn from one
of a few families with closed-form third cumulant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._validation import check_positive_int

__all__ = [
    "FilterCoefficients",
    "InnovationSpec",
    "LinearModel",
    "TimeSeriesSample",
    "SymmetryVerdict",
    "simulate",
    "transfer_function",
    "transfer_function_grid",
    "spectrum",
    "classify_symmetry",
    "reverse_model",
]


@dataclass(frozen=True)
class FilterCoefficients:
    """Coefficients ``c(k_min), ..., c(k_max)`` of a finite linear filter.

    Parameters
    ----------
    k_min : int
        Index of the first coefficient.
    values : sequence of float
        ``values[j] = c(k_min + j)``. The first and last entries must be
        nonzero so that the support is tight.
    """

    k_min: int
    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in np.asarray(self.values, dtype=float).ravel())
        if not vals:
            raise ValueError("filter needs at least one coefficient")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("filter coefficients must be finite")
        if vals[0] == 0.0 or vals[-1] == 0.0:
            raise ValueError("filter support is not tight: first and last coefficients must be nonzero")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "k_min", int(self.k_min))

    @classmethod
    def trimmed(cls, values, k_min=0):
        """Build a filter after stripping leading and trailing zeros."""
        arr = np.asarray(values, dtype=float).ravel()
        nz = np.flatnonzero(arr)
        if nz.size == 0:
            raise ValueError("filter needs at least one nonzero coefficient")
        return cls(k_min + int(nz[0]), tuple(arr[nz[0]: nz[-1] + 1]))

    @property
    def k_max(self):
        return self.k_min + len(self.values) - 1

    @property
    def width(self):
        """Number of coefficients in the support window."""
        return len(self.values)

    @property
    def array(self):
        return np.array(self.values, dtype=float)

    @property
    def support(self):
        return np.arange(self.k_min, self.k_max + 1)

    def coefficient(self, k):
        """``c(k)``, zero outside the support."""
        j = k - self.k_min
        if 0 <= j < len(self.values):
            return self.values[j]
        return 0.0

    def scaled(self, alpha):
        return FilterCoefficients(self.k_min, tuple(alpha * v for v in self.values))

    def shifted(self, d):
        return FilterCoefficients(self.k_min + d, self.values)

    def __str__(self):
        vals = ",".join(repr(v) for v in self.values)
        return f"c[{self.k_min}..{self.k_max}]=({vals})"


_INNOVATION_DEFAULTS = {
    "gaussian": {"sigma": 1.0},
    "centered_exponential": {"rate": 1.0, "sign": 1.0},
    "centered_gamma": {"shape": 2.0, "scale": 1.0, "sign": 1.0},
    "two_point": {"p": 0.5, "scale": 1.0},
}


@dataclass(frozen=True)
class InnovationSpec:
    """Centered i.i.d. innovation distribution.

    Supported kinds and their parameters:

    ``gaussian``              sigma
    ``centered_exponential``  rate, sign  (``sign * (E - 1/rate)``)
    ``centered_gamma``        shape, scale, sign
    ``two_point``             p, scale    (``scale * (Bernoulli(p) - p)``)

    ``sign=-1`` mirrors a skewed family to get negative skew.
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _INNOVATION_DEFAULTS:
            raise ValueError(
                f"unknown innovation kind {self.kind!r}; expected one of {sorted(_INNOVATION_DEFAULTS)}"
            )
        defaults = _INNOVATION_DEFAULTS[self.kind]
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise ValueError(f"unknown parameter(s) {sorted(unknown)} for innovation kind {self.kind!r}")
        merged = {k: float(self.params.get(k, v)) for k, v in defaults.items()}
        if self.kind == "gaussian" and not merged["sigma"] > 0:
            raise ValueError("sigma must be positive")
        if self.kind == "centered_exponential" and not merged["rate"] > 0:
            raise ValueError("rate must be positive")
        if self.kind == "centered_gamma" and not (merged["shape"] > 0 and merged["scale"] > 0):
            raise ValueError("shape and scale must be positive")
        if self.kind == "two_point":
            if not 0.0 < merged["p"] < 1.0:
                raise ValueError("p must lie strictly between 0 and 1")
            if not merged["scale"] > 0:
                raise ValueError("scale must be positive")
        if "sign" in merged and merged["sign"] not in (1.0, -1.0):
            raise ValueError("sign must be +1 or -1")
        object.__setattr__(self, "params", merged)

    @classmethod
    def gaussian(cls, sigma=1.0):
        return cls("gaussian", {"sigma": sigma})

    @classmethod
    def centered_exponential(cls, rate=1.0, sign=1.0):
        return cls("centered_exponential", {"rate": rate, "sign": sign})

    @classmethod
    def centered_gamma(cls, shape=2.0, scale=1.0, sign=1.0):
        return cls("centered_gamma", {"shape": shape, "scale": scale, "sign": sign})

    @classmethod
    def two_point(cls, p=0.5, scale=1.0):
        return cls("two_point", {"p": p, "scale": scale})

    @property
    def mean(self):
        return 0.0

    @property
    def variance(self):
        p = self.params
        if self.kind == "gaussian":
            return p["sigma"] ** 2
        if self.kind == "centered_exponential":
            return 1.0 / p["rate"] ** 2
        if self.kind == "centered_gamma":
            return p["shape"] * p["scale"] ** 2
        return p["scale"] ** 2 * p["p"] * (1.0 - p["p"])

    @property
    def cum3(self):
        """Third cumulant of ``Z(0)``."""
        p = self.params
        if self.kind == "gaussian":
            return 0.0
        if self.kind == "centered_exponential":
            return p["sign"] * 2.0 / p["rate"] ** 3
        if self.kind == "centered_gamma":
            return p["sign"] * 2.0 * p["shape"] * p["scale"] ** 3
        q = p["p"]
        return p["scale"] ** 3 * q * (1.0 - q) * (1.0 - 2.0 * q)

    @property
    def is_symmetric(self):
        """Whether the distribution of ``Z(0)`` is symmetric about zero."""
        return self.kind == "gaussian" or (self.kind == "two_point" and self.params["p"] == 0.5)

    def sample(self, rng, size):
        p = self.params
        if self.kind == "gaussian":
            return p["sigma"] * rng.standard_normal(size)
        if self.kind == "centered_exponential":
            return p["sign"] * (rng.standard_exponential(size) / p["rate"] - 1.0 / p["rate"])
        if self.kind == "centered_gamma":
            return p["sign"] * p["scale"] * (rng.standard_gamma(p["shape"], size) - p["shape"])
        return p["scale"] * ((rng.random(size) < p["p"]).astype(float) - p["p"])

    def __str__(self):
        args = ",".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{self.kind}({args})"


@dataclass(frozen=True)
class LinearModel:
    filter: FilterCoefficients
    innovations: InnovationSpec
    name: str | None = None

    @property
    def identifier(self):
        return self.name or f"{self.filter}/{self.innovations}"

    @property
    def cum3_x(self):
        """Third cumulant of the marginal ``X(0)``: ``cum3(Z) * sum c(k)^3``."""
        return self.innovations.cum3 * float(np.sum(self.filter.array ** 3))

    @property
    def variance_x(self):
        return self.innovations.variance * float(np.sum(self.filter.array ** 2))


@dataclass(frozen=True, eq=False)
class TimeSeriesSample:
    """A realized path together with how it was produced.

    ``seed`` is None for data read from disk.
    """

    values: np.ndarray
    seed: int | None = None
    provenance: str = "external"

    def __post_init__(self):
        arr = np.array(self.values, dtype=float).ravel()
        if arr.size < 1:
            raise ValueError("a sample needs at least one value")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self):
        return self.values.shape[0]

    def reversed(self):
        return TimeSeriesSample(self.values[::-1].copy(), self.seed, f"reversed:{self.provenance}")


def simulate(model, n, seed):
    """Draw ``X(0), ..., X(n-1)`` from ``model``.

    Exactly ``n + width - 1`` innovations are drawn from
    ``numpy.random.default_rng(seed)``, so the path is exactly stationary
    and reproducible bit for bit.
    """
    n = check_positive_int(n, "n")
    seed = check_positive_int(seed, "seed", minimum=0)
    rng = np.random.default_rng(seed)
    c = model.filter.array
    z = model.innovations.sample(rng, n + c.size - 1)
    # z[j] holds Z(j - k_max); 'valid' convolution then yields X(0..n-1)
    x = np.convolve(z, c, mode="valid")
    return TimeSeriesSample(x, seed=seed, provenance=model.identifier)


def transfer_function(filter, omega):
    """``phi(omega) = sum_k c(k) exp(-i k omega)`` by direct summation.

    ``omega`` may be a scalar or an array.
    """
    omega = np.asarray(omega, dtype=float)
    k = filter.support.astype(float)
    phase = np.exp(-1j * np.multiply.outer(omega, k))
    out = phase @ filter.array
    return complex(out) if out.ndim == 0 else out


def _roots_of_unity(G):
    # exact conjugate pairing: W[G - m] == conj(W[m]) bit for bit
    m = np.arange(G // 2 + 1)
    half = np.exp(-2j * np.pi * m / G)
    W = np.empty(G, dtype=complex)
    W[: G // 2 + 1] = half
    W[G // 2 + 1:] = np.conj(half[1: G - G // 2][::-1])
    return W


def transfer_function_grid(filter, G):
    """Evaluate ``phi`` on ``omega_j = 2 pi j / G``, ``j = 0..G-1``.

    Exponents are reduced modulo ``G`` in integer arithmetic, so the result
    is exactly ``G``-periodic and satisfies ``phi[G-j] == conj(phi[j])``.
    """
    G = check_positive_int(G, "G")
    W = _roots_of_unity(G)
    idx = np.multiply.outer(np.arange(G), filter.support) % G
    return W[idx] @ filter.array


def spectrum(filter, omega):
    """``S(omega) = |phi(omega)|^2`` (innovation variance not included)."""
    return np.abs(transfer_function(filter, omega)) ** 2


class SymmetryVerdict(NamedTuple):
    kind: str  # "symmetric", "skew_symmetric" or "neither"
    index: int | None = None


def classify_symmetry(filter, tol=None):
    """Classify ``c`` as symmetric or skew-symmetric about ``k_min + k_max``.

    For tight support the only possible centre of (skew-)symmetry is
    ``s = k_min + k_max``. ``tol`` is absolute and defaults to
    ``1e-9 * max|c|``.
    """
    c = filter.array
    if tol is None:
        tol = 1e-9 * float(np.max(np.abs(c)))
    elif tol < 0:
        raise ValueError("tol must be nonnegative")
    s = filter.k_min + filter.k_max
    flipped = c[::-1]
    if np.all(np.abs(c - flipped) <= tol):
        return SymmetryVerdict("symmetric", s)
    if np.all(np.abs(c + flipped) <= tol):
        return SymmetryVerdict("skew_symmetric", s)
    return SymmetryVerdict("neither", None)


def reverse_model(model):
    """Time-reversed model with ``c~(k) = c(-k)``; innovations unchanged."""
    f = model.filter
    rev = FilterCoefficients(-f.k_max, f.values[::-1])
    name = model.name
    if name:
        name = name[len("reversed:"):] if name.startswith("reversed:") else f"reversed:{name}"
    return LinearModel(rev, model.innovations, name)
