"""Bispectra on the uniform grid ``omega_j = 2 pi j / G`` over ``[0, 2 pi)^2``.

The bispectrum is the function ``B`` whose two-dimensional inverse Fourier
transform over ``[0, 2 pi)^2`` reproduces ``cum(X(0), X(t1), X(t2))``. For
a linear model ``B = cum3(Z) / (2 pi)^2 * phi(w1) phi(w2) phi(-w1 - w2)``.

Grid points where ``phi`` vanishes carry no phase information: the
bispectrum is only defined up to sets of measure zero, and on a finite
grid those sets become individual masked points.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._validation import check_nonnegative, check_positive_int, check_series
from .cumulant import model_cumulant
from .exceptions import GridTooCoarseError, InsufficientLengthError
from .linmodel import _roots_of_unity, transfer_function_grid

__all__ = [
    "BifrequencyField",
    "EstimationPlan",
    "BoundCheck",
    "analytic_bispectrum",
    "correspondence_check",
    "estimate_bispectrum",
    "estimate_spectrum",
    "realness_statistic",
    "triple_product_bound_check",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class BifrequencyField:
    """Complex ``G x G`` grid of bispectrum values.

    ``values[j, k]`` is the value at ``(2 pi j / G, 2 pi k / G)``.
    """

    grid_size: int
    values: np.ndarray
    kind: str = "analytic"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        G = check_positive_int(self.grid_size, "grid_size")
        arr = np.array(self.values, dtype=complex)
        if arr.shape != (G, G):
            raise ValueError(f"field shape {arr.shape} does not match grid_size={G}")
        if self.kind not in ("analytic", "estimated"):
            raise ValueError(f"kind must be 'analytic' or 'estimated', got {self.kind!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def omegas(self):
        return TWO_PI * np.arange(self.grid_size) / self.grid_size

    def index_nearest(self, omega):
        return int(round(omega / TWO_PI * self.grid_size)) % self.grid_size

    def at(self, omega1, omega2):
        """Value at the grid point nearest ``(omega1, omega2)``."""
        return complex(self.values[self.index_nearest(omega1), self.index_nearest(omega2)])

    def l1_norm(self):
        return float(np.sum(np.abs(self.values)))

    def conj(self):
        return BifrequencyField(self.grid_size, np.conj(self.values), self.kind, dict(self.metadata))

    def to_csv(self):
        buf = io.StringIO()
        buf.write("omega1,omega2,re,im\n")
        w = self.omegas
        for j in range(self.grid_size):
            for k in range(self.grid_size):
                v = self.values[j, k]
                buf.write(f"{float(w[j])!r},{float(w[k])!r},{float(v.real)!r},{float(v.imag)!r}\n")
        return buf.getvalue()

    def metadata_text(self):
        doc = {"grid_size": self.grid_size, "kind": self.kind, "metadata": self.metadata}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_csv(cls, text, kind="analytic", metadata=None):
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        if not lines or lines[0].strip() != "omega1,omega2,re,im":
            raise ValueError("expected header 'omega1,omega2,re,im'")
        rows = np.array([[float(t) for t in ln.split(",")] for ln in lines[1:]])
        G = int(round(math.sqrt(rows.shape[0])))
        if G * G != rows.shape[0]:
            raise ValueError("row count is not a perfect square")
        vals = (rows[:, 2] + 1j * rows[:, 3]).reshape(G, G)
        return cls(G, vals, kind, dict(metadata or {}))


def analytic_bispectrum(model, G):
    """Evaluate ``cum3 / (2 pi)^2 * phi(w1) phi(w2) conj(phi(w1 + w2))`` on the grid.

    ``phi(-w) = conj(phi(w))`` because the coefficients are real.
    """
    G = check_positive_int(G, "G", minimum=4)
    phi = transfer_function_grid(model.filter, G)
    idx = np.add.outer(np.arange(G), np.arange(G)) % G
    scale = model.innovations.cum3 / TWO_PI ** 2
    vals = scale * (np.multiply.outer(phi, phi) * np.conj(phi[idx]))
    meta = {"model": model.identifier, "cum3": model.innovations.cum3}
    return BifrequencyField(G, vals, "analytic", meta)


def _check_resolution(model, G, T):
    need = 8 * (model.filter.width + T)
    if G < need:
        raise GridTooCoarseError(
            f"grid too coarse: G={G} but exact quadrature needs G >= 8*(width + T) = {need}"
        )


def correspondence_check(model, G, T, field=None):
    """Max error between quadrature of ``B`` and the exact cumulants.

    Computes ``int int exp(i (t1 w1 + t2 w2)) B dw1 dw2`` with the ``G x G``
    trapezoid rule for all ``|t1|, |t2| <= T``. For a finite filter the
    integrand is a trigonometric polynomial of degree below ``G``, so the
    rule is exact up to rounding.

    ``field`` defaults to ``analytic_bispectrum(model, G)``.
    """
    G = check_positive_int(G, "G")
    T = check_positive_int(T, "T")
    _check_resolution(model, G, T)
    if field is None:
        field = analytic_bispectrum(model, G)
    lags = np.arange(-T, T + 1)
    W = _roots_of_unity(G)
    E = W[np.multiply.outer(-lags, np.arange(G)) % G]  # exp(+i t w_j)
    h = TWO_PI / G
    quad = h * h * (E @ field.values @ E.T)
    exact = np.array([[model_cumulant(model, t1, t2) for t2 in lags] for t1 in lags])
    return float(np.max(np.abs(quad - exact)))


@dataclass(frozen=True)
class EstimationPlan:
    """Segment-averaging parameters for the biperiodogram estimator."""

    segment_len: int
    n_segments: int
    taper: str = "none"

    def __post_init__(self):
        L = check_positive_int(self.segment_len, "segment_len", minimum=2)
        check_positive_int(self.n_segments, "n_segments")
        if L % 2:
            raise ValueError(f"segment_len must be even, got {L}")
        if self.taper not in ("none", "hann"):
            raise ValueError(f"taper must be 'none' or 'hann', got {self.taper!r}")

    @classmethod
    def for_length(cls, n, segment_len, taper="none"):
        """Use as many whole segments as fit in ``n`` samples."""
        return cls(segment_len, max(1, n // segment_len), taper)

    @property
    def required_length(self):
        return self.segment_len * self.n_segments

    def window(self):
        L = self.segment_len
        if self.taper == "hann":
            return 0.5 - 0.5 * np.cos(TWO_PI * np.arange(L) / L)
        return np.ones(L)

    def check(self, n):
        if self.required_length > n:
            raise InsufficientLengthError(
                f"insufficient length: plan needs {self.segment_len} x {self.n_segments} = "
                f"{self.required_length} samples, series has {n}"
            )


def _segment_dft(series, plan):
    x = check_series(getattr(series, "values", series))
    plan.check(x.shape[0])
    L, M = plan.segment_len, plan.n_segments
    seg = x[: L * M].reshape(M, L)
    seg = seg - seg.mean(axis=1, keepdims=True)
    w = plan.window()
    return np.fft.fft(seg * w, axis=1), w


def estimate_bispectrum(series, plan):
    """Averaged biperiodogram on the ``L x L`` grid.

    Each segment contributes ``d(w_j) d(w_k) conj(d(w_j + w_k)) / (sum(w^3) (2 pi)^2)``,
    where ``d`` is the DFT of the mean-removed, tapered segment. Without a
    taper ``sum(w^3) = L``.
    """
    D, w = _segment_dft(series, plan)
    L, M = plan.segment_len, plan.n_segments
    Dc = np.conj(D)
    acc = np.empty((L, L), dtype=complex)
    for i in range(L):
        # row i: sum_m d_m(i) d_m(j) conj(d_m(i + j))
        acc[i] = D[:, i] @ (D * np.roll(Dc, -i, axis=1))
    acc = 0.5 * (acc + acc.T)
    vals = acc / (M * float(np.sum(w ** 3)) * TWO_PI ** 2)
    meta = {
        "segment_len": L,
        "n_segments": M,
        "taper": plan.taper,
        "provenance": getattr(series, "provenance", "array"),
        "seed": getattr(series, "seed", None),
    }
    return BifrequencyField(L, vals, "estimated", meta)


def estimate_spectrum(series, plan):
    """Averaged periodogram on the ``L``-point grid.

    Estimates ``var(Z) * |phi(w)|^2``; the zero-frequency bin is zero
    because each segment is mean-removed.
    """
    D, w = _segment_dft(series, plan)
    return np.mean(np.abs(D) ** 2, axis=0) / float(np.sum(w ** 2))


def realness_statistic(field, spectrum_floor=1e-3):
    """``sum |Im B| / sum |B|`` over points with ``|B| > spectrum_floor * max |B|``.

    Zero for a real field and for an all-zero field; one for a purely
    imaginary field.
    """
    spectrum_floor = check_nonnegative(spectrum_floor, "spectrum_floor")
    vals = field.values
    mag = np.abs(vals)
    top = float(mag.max()) if mag.size else 0.0
    if top == 0.0:
        return 0.0
    keep = mag > spectrum_floor * top
    return float(np.sum(np.abs(vals.imag[keep])) / np.sum(mag[keep]))


class BoundCheck(NamedTuple):
    holds: bool
    left: float
    right: float
    violation: float  # left - right when violated, else 0


def triple_product_bound_check(psi1, psi2, psi3, rtol=1e-9):
    """Check ``int int |psi1(w1) psi2(w2) psi3(-w1-w2)| <= sqrt(2 pi) prod ||psi_i||_2``.

    The three arrays are samples on the same uniform grid over
    ``[0, 2 pi)``; integrals use the trapezoid rule. The discrete sums obey
    the same inequality (Cauchy-Schwarz over the grid), so a violation
    indicates a bug rather than quadrature error.
    """
    psis = [np.asarray(p, dtype=complex).ravel() for p in (psi1, psi2, psi3)]
    G = psis[0].size
    if any(p.size != G for p in psis):
        raise ValueError("all three functions must share one grid")
    if G < 8:
        raise ValueError(f"grid size must be at least 8, got {G}")
    h = TWO_PI / G
    a1, a2, a3 = (np.abs(p) for p in psis)
    neg = (-np.add.outer(np.arange(G), np.arange(G))) % G
    left = h * h * float(np.sum(np.multiply.outer(a1, a2) * a3[neg]))
    norms = [math.sqrt(h * float(np.sum(a ** 2))) for a in (a1, a2, a3)]
    right = math.sqrt(TWO_PI) * norms[0] * norms[1] * norms[2]
    holds = left <= right * (1.0 + rtol)
    return BoundCheck(holds, left, right, 0.0 if holds else left - right)
