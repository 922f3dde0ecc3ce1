"""Multichannel images, ROI Gram matrices, virtual coils and energy curves."""

import csv
import io
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, EmptyMask, ValidationError, ZeroTrace
from .linalg import hermitian
from .solvers import METHODS, WeightSet, energies, solve

__all__ = [
    "MultichannelImage",
    "VirtualCoilSet",
    "MetricsRow",
    "MetricsTable",
    "CSV_HEADER",
    "as_mask",
    "build_gram",
    "regularize",
    "apply_weights",
    "root_sum_of_squares",
    "energy_curves",
]

CSV_HEADER = ("nv", "method", "retained_signal", "retained_interference", "sir")
DEFAULT_REG = 1e-9


@dataclass(frozen=True)
class MultichannelImage:
    """Complex channel images, shape ``(nc, ny, nx)``."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.ndim != 3 or v.shape[0] < 1:
            raise DimensionMismatch(f"expected (nc, ny, nx) values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("image contains non-finite values")
        object.__setattr__(self, "values", v)

    @property
    def nc(self):
        return self.values.shape[0]

    @property
    def shape(self):
        return self.values.shape[1:]


@dataclass(frozen=True)
class VirtualCoilSet:
    images: np.ndarray
    weights: WeightSet

    @property
    def nv(self):
        return self.images.shape[0]


def as_mask(mask, shape=None):
    m = np.asarray(mask)
    if m.ndim != 2:
        raise DimensionMismatch(f"mask must be 2-D, got shape {m.shape}")
    if shape is not None and m.shape != tuple(shape):
        raise DimensionMismatch(f"mask is {m.shape}, image grid is {tuple(shape)}")
    return m != 0


def build_gram(img, mask):
    """Sum of ``s(p) s(p)^H`` over the masked pixels, where ``s(p)`` stacks
    the channel values at pixel ``p``."""
    if not isinstance(img, MultichannelImage):
        img = MultichannelImage(img)
    m = as_mask(mask, img.shape)
    if not m.any():
        raise EmptyMask("ROI mask selects no pixels")
    S = img.values[:, m]
    return hermitian(S @ S.conj().T)


def regularize(B, eps=DEFAULT_REG):
    """``B + eps * (trace(B) / nc) * I``."""
    B = hermitian(B, "B")
    if not eps >= 0:
        raise ValidationError(f"eps must be >= 0, got {eps}")
    tr = float(np.trace(B).real)
    if not tr > 0:
        raise ZeroTrace("interference Gram matrix has zero trace; the ROI captured no energy")
    if eps == 0:
        return B
    return B + (eps * tr / B.shape[0]) * np.eye(B.shape[0])


def apply_weights(img, W):
    """Virtual coil ``j`` at pixel ``p`` is ``w_j^H s(p)``."""
    if not isinstance(img, MultichannelImage):
        img = MultichannelImage(img)
    V = W.vectors if isinstance(W, WeightSet) else np.asarray(W, dtype=np.complex128)
    if V.ndim == 1:
        V = V[:, None]
    if V.shape[0] != img.nc:
        raise DimensionMismatch(f"weights have nc={V.shape[0]}, image has nc={img.nc}")
    W = W if isinstance(W, WeightSet) else WeightSet(V)
    images = np.tensordot(V.conj().T, img.values, axes=(1, 0))
    return VirtualCoilSet(images, W)


def root_sum_of_squares(values):
    return np.sqrt(np.sum(np.abs(values) ** 2, axis=0))


class MetricsRow(NamedTuple):
    nv: int
    method: str
    retained_signal: float
    retained_interference: float
    sir: float


@dataclass(frozen=True)
class MetricsTable:
    rows: tuple

    def for_method(self, method):
        return [r for r in self.rows if r.method == method]

    def lookup(self, nv, method):
        for r in self.rows:
            if r.nv == nv and r.method == method:
                return r
        raise KeyError((nv, method))

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.rows:
            writer.writerow([r.nv, r.method, repr(r.retained_signal),
                             repr(r.retained_interference), repr(r.sir)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if tuple(header) != CSV_HEADER:
            raise ValidationError(f"unexpected CSV header {header}")
        return cls(tuple(MetricsRow(int(n), m, float(s), float(i), float(q))
                         for n, m, s, i, q in reader))


def energy_curves(A, B, methods=METHODS, nv_max=None):
    """Retained signal/interference fractions and SIR for ``nv = 1..nv_max``.

    Fractions are normalized by ``trace(A)`` and ``trace(B)``. Both solvers
    produce nested weight sets (the ``nv`` solution is a prefix of the
    ``nv + 1`` one), so each method is solved once at ``nv_max``.
    """
    A = hermitian(A, "A")
    B = hermitian(B, "B")
    nc = A.shape[0]
    nv_max = nc if nv_max is None else nv_max
    trA = float(np.trace(A).real)
    trB = float(np.trace(B).real)
    if not (trA > 0 and trB > 0):
        raise ZeroTrace("Gram matrices must have positive trace")
    per_method = {}
    for method in methods:
        W = solve(A, B, nv_max, method)
        per_method[method] = (np.cumsum(energies(W, A)), np.cumsum(energies(W, B)))
    rows = []
    for nv in range(1, nv_max + 1):
        for method in methods:
            ca, cb = per_method[method]
            a, b = float(ca[nv - 1]), float(cb[nv - 1])
            rows.append(MetricsRow(nv, method, a / trA, b / trB, a / b))
    return MetricsTable(tuple(rows))
