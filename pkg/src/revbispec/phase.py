"""Transfer-function phase modulo pi.

If the bispectrum of a linear process is real, the principal argument
``psi(w) = arg phi(w)`` satisfies ``psi(w1) + psi(w2) - psi(w1 + w2)`` in
``pi Z`` and therefore has the form ``(n/2) w + k(w)`` with integer ``n``
and ``k(w)`` in ``pi Z``. Because the slope is known to be a half integer,
it is found by exhaustive search over ``n`` instead of phase unwrapping.

With ``phi(w) = sum c(k) exp(-i k w)``, a filter symmetric about ``s``
has ``psi(w) = -(s/2) w  (mod pi)``, hence ``s = -n``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from ._validation import check_positive_int
from .exceptions import InsufficientGridError
from .linmodel import transfer_function_grid

__all__ = [
    "PhaseFunction",
    "PhaseDecomposition",
    "extract_phase",
    "cocycle_residual",
    "fit_half_integer_slope",
    "fit_phase",
    "symmetry_index_from_phase",
]

PI = math.pi


def _dist_to_pi_multiple(r):
    return np.abs(r - PI * np.round(r / PI))


@dataclass(frozen=True, eq=False)
class PhaseFunction:
    """Principal argument in ``[-pi, pi)`` on ``omega_j = 2 pi j / G``.

    Points where ``|phi|`` falls below the floor are marked invalid.
    """

    grid_size: int
    values: np.ndarray
    valid: np.ndarray

    def __post_init__(self):
        G = check_positive_int(self.grid_size, "grid_size")
        vals = np.array(self.values, dtype=float)
        valid = np.array(self.valid, dtype=bool)
        if vals.shape != (G,) or valid.shape != (G,):
            raise ValueError("values and valid must have length grid_size")
        vals.setflags(write=False)
        valid.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "valid", valid)

    @property
    def omegas(self):
        return 2.0 * PI * np.arange(self.grid_size) / self.grid_size


@dataclass(frozen=True, eq=False)
class PhaseDecomposition:
    """``psi(w) = offset + (n/2) w + pi * k_labels`` up to ``residual``.

    ``k_labels`` has one entry per grid point; entries at invalid points
    are 0 and carry no meaning. ``offset`` is 0 for symmetric filters and
    ``pi/2`` when fitting a skew-symmetric phase.
    """

    n: int
    k_labels: np.ndarray
    valid: np.ndarray
    residual: float
    offset: float = 0.0

    def __post_init__(self):
        labels = np.array(self.k_labels, dtype=np.int64)
        valid = np.array(self.valid, dtype=bool)
        labels.setflags(write=False)
        valid.setflags(write=False)
        object.__setattr__(self, "k_labels", labels)
        object.__setattr__(self, "valid", valid)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "residual", float(self.residual))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def slope(self):
        return self.n / 2.0

    def __eq__(self, other):
        if not isinstance(other, PhaseDecomposition):
            return NotImplemented
        return (
            self.n == other.n
            and self.residual == other.residual
            and self.offset == other.offset
            and np.array_equal(self.valid, other.valid)
            and np.array_equal(self.k_labels[self.valid], other.k_labels[other.valid])
        )

    def _runs(self):
        tokens = [str(k) if ok else "-" for k, ok in zip(self.k_labels.tolist(), self.valid.tolist())]
        runs = []
        for tok in tokens:
            if runs and runs[-1][1] == tok:
                runs[-1][0] += 1
            else:
                runs.append([1, tok])
        return " ".join(f"{count}*{tok}" for count, tok in runs)

    def to_text(self):
        """Structured text; ``k_labels`` is run-length encoded, ``-`` marks invalid points."""
        return (
            f"n: {self.n}\n"
            f"offset: {self.offset!r}\n"
            f"residual: {self.residual!r}\n"
            f"grid_size: {self.k_labels.size}\n"
            f"k_labels: {self._runs()}\n"
        )

    @classmethod
    def from_text(cls, text):
        fields = {}
        for line in text.splitlines():
            if line.strip():
                key, _, value = line.partition(":")
                fields[key.strip()] = value.strip()
        labels, valid = [], []
        for run in fields["k_labels"].split():
            m = re.fullmatch(r"(\d+)\*(-|-?\d+)", run)
            if not m:
                raise ValueError(f"bad run {run!r}")
            count, tok = int(m.group(1)), m.group(2)
            labels.extend([0 if tok == "-" else int(tok)] * count)
            valid.extend([tok != "-"] * count)
        if len(labels) != int(fields["grid_size"]):
            raise ValueError("run lengths do not add up to grid_size")
        return cls(int(fields["n"]), labels, valid, float(fields["residual"]), float(fields["offset"]))


def extract_phase(filter, G, floor=1e-6):
    """Principal argument of the transfer function on a ``G``-point grid.

    Points with ``|phi| <= floor * max |phi|`` are masked.
    """
    G = check_positive_int(G, "G", minimum=8)
    if not floor > 0:
        raise ValueError(f"floor must be positive, got {floor}")
    phi = transfer_function_grid(filter, G)
    mag = np.abs(phi)
    valid = mag > floor * mag.max()
    if not valid.any():
        raise InsufficientGridError("transfer function vanishes on grid")
    psi = np.angle(phi)
    psi[psi >= PI] -= 2.0 * PI  # numpy returns (-pi, pi]
    return PhaseFunction(G, psi, valid)


def cocycle_residual(phase):
    """Largest distance of ``psi(wi) + psi(wj) - psi(wi + wj)`` from ``pi Z``.

    Taken over pairs where all three points are valid; ``wi + wj`` wraps
    modulo ``2 pi`` since ``psi`` is periodic.
    """
    if np.count_nonzero(phase.valid) < 3:
        raise InsufficientGridError("insufficient valid grid")
    G = phase.grid_size
    psi, ok = phase.values, phase.valid
    idx = np.add.outer(np.arange(G), np.arange(G)) % G
    r = np.add.outer(psi, psi) - psi[idx]
    mask = np.logical_and.outer(ok, ok) & ok[idx]
    if not mask.any():
        raise InsufficientGridError("insufficient valid grid")
    return float(np.max(_dist_to_pi_multiple(r[mask])))


def fit_half_integer_slope(phase, n_max, offset=0.0, tie_tol=1e-12):
    """Best ``n`` in ``[-n_max, n_max]`` for ``psi(w) - offset = (n/2) w  (mod pi)``.

    Ties (within ``tie_tol``) go to the smaller ``|n|``, then to positive ``n``.
    """
    n_max = check_positive_int(n_max, "n_max")
    G = phase.grid_size
    j = np.flatnonzero(phase.valid)
    psi = phase.values[j] - offset
    best = None
    for n in range(-n_max, n_max + 1):
        d = psi - (n * j) * PI / G  # (n/2) * 2 pi j / G, product kept integral
        res = float(np.max(_dist_to_pi_multiple(d)))
        key = (res, abs(n), -n)
        if best is None or res < best[0][0] - tie_tol or (
            abs(res - best[0][0]) <= tie_tol and key[1:] < best[0][1:]
        ):
            best = (key, n, d)
    (res, _, _), n, d = best
    labels = np.zeros(G, dtype=np.int64)
    labels[j] = np.round(d / PI).astype(np.int64)
    return PhaseDecomposition(n, labels, phase.valid, res, offset)


def fit_phase(phase, n_max):
    """Fit with offset 0 and with offset ``pi/2``; return the better decomposition.

    The quarter-turn offset is what a skew-symmetric filter produces. Offset
    0 wins ties.
    """
    plain = fit_half_integer_slope(phase, n_max)
    quarter = fit_half_integer_slope(phase, n_max, offset=PI / 2)
    return quarter if quarter.residual < plain.residual else plain


def symmetry_index_from_phase(decomp, residual_tol=1e-6):
    """Centre of coefficient symmetry ``s = -n`` if the fit is good, else None."""
    if not residual_tol > 0:
        raise ValueError("residual_tol must be positive")
    if decomp.residual <= residual_tol:
        return -decomp.n
    return None
