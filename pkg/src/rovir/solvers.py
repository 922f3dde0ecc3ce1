"""Virtual-coil weight selection.

Two procedures pick ``nv`` orthonormal weight vectors from a signal Gram
matrix ``A`` and an interference Gram matrix ``B``:

* :func:`solve_original` keeps the span of the top-``nv`` generalized
  eigenvectors of ``(A, B)`` and orthonormalizes them in order.
* :func:`solve_greedy` adds one vector at a time, each the exact maximizer of
  the running signal-to-interference ratio over unit vectors orthogonal to
  the ones already chosen.

Both are scored with :func:`sir`, the ratio of total retained signal energy
to total retained interference energy for a Euclidean-orthonormal set.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import (
    DimensionMismatch,
    InvalidNv,
    SubspaceExhausted,
    ValidationError,
    ZeroDenominator,
)
from .linalg import fix_phase, gevd, hermitian, orthonormal_complement, orthonormalize

__all__ = [
    "METHODS",
    "WeightSet",
    "GreedyState",
    "sir",
    "energies",
    "transformed_objective",
    "solve_rank1",
    "solve_original",
    "greedy_step",
    "solve_greedy",
    "solve",
]

METHODS = ("original", "greedy")


@dataclass(frozen=True)
class WeightSet:
    """``nv`` weight vectors stored as the columns of an ``nc x nv`` array,
    in selection order."""

    vectors: np.ndarray
    method: str = "original"

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=np.complex128)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[1] > v.shape[0]:
            raise InvalidNv(f"need nv <= nc, got vectors of shape {v.shape}")
        object.__setattr__(self, "vectors", v)

    @property
    def nc(self):
        return self.vectors.shape[0]

    @property
    def nv(self):
        return self.vectors.shape[1]

    def prefix(self, k):
        return WeightSet(self.vectors[:, :k], self.method)

    def orthonormality_error(self):
        G = self.vectors.conj().T @ self.vectors
        return float(np.max(np.abs(G - np.eye(self.nv)))) if self.nv else 0.0


def _columns(W):
    if isinstance(W, WeightSet):
        return W.vectors
    W = np.asarray(W, dtype=np.complex128)
    return W[:, None] if W.ndim == 1 else W


def energies(W, M):
    """Per-vector energies ``w_i^H M w_i`` (real)."""
    W = _columns(W)
    M = np.asarray(M, dtype=np.complex128)
    if M.shape[0] != W.shape[0]:
        raise DimensionMismatch(f"weights are length {W.shape[0]}, matrix is {M.shape}")
    return np.einsum("ij,ij->j", W.conj(), M @ W).real


def sir(W, A, B):
    """Total retained signal energy over total retained interference energy.

    Raises
    ------
    ZeroDenominator
        If the retained interference energy is ``<= 1e-300``.
    """
    num = energies(W, A).sum()
    den = energies(W, B).sum()
    if den <= 1e-300:
        raise ZeroDenominator(f"retained interference energy is {den:g}")
    return float(num / den)


def transformed_objective(Y, A, L):
    """Whitened-coordinate objective ``trace(Y^H L^-1 A L^-H Y) / trace(Y^H Y)``.

    ``L`` is the Cholesky factor of ``B``; for orthonormal ``Y`` the
    denominator is ``nv``.
    """
    Y = _columns(Y)
    A = np.asarray(A, dtype=np.complex128)
    L = np.asarray(L, dtype=np.complex128)
    if not (A.shape == L.shape and A.shape[0] == Y.shape[0]):
        raise DimensionMismatch(f"Y {Y.shape}, A {A.shape}, L {L.shape}")
    C = solve_triangular(L, A, lower=True)
    C = solve_triangular(L, C.conj().T, lower=True).conj().T
    num = np.einsum("ij,ij->", Y.conj(), C @ Y).real
    return float(num / np.vdot(Y, Y).real)


def solve_rank1(A, B):
    """Unit vector maximizing ``w^H A w / w^H B w``: the top generalized
    eigenvector. Swap the arguments to get the minimizer."""
    return gevd(A, B).eigenvectors[:, 0].copy()


def _check_nv(nv, nc):
    if isinstance(nv, bool) or not isinstance(nv, (int, np.integer)):
        raise InvalidNv(f"nv must be an integer, got {nv!r}")
    if not 1 <= nv <= nc:
        raise InvalidNv(f"nv must lie in 1..{nc}, got {nv}")


def solve_original(A, B, nv):
    """Top-``nv`` generalized eigenvectors, orthonormalized by order-preserving QR."""
    res = gevd(A, B)
    _check_nv(nv, res.n)
    return WeightSet(orthonormalize(res.top(nv)), "original")


@dataclass(frozen=True)
class GreedyState:
    """Vectors chosen so far plus their accumulated signal (``alpha``) and
    interference (``beta``) energies."""

    selected: np.ndarray
    alpha: float = 0.0
    beta: float = 0.0

    @classmethod
    def empty(cls, nc):
        return cls(np.zeros((nc, 0), dtype=np.complex128))

    @property
    def nc(self):
        return self.selected.shape[0]

    @property
    def count(self):
        return self.selected.shape[1]

    def extend(self, w, A, B):
        w = np.asarray(w, dtype=np.complex128).reshape(-1, 1)
        return GreedyState(
            np.hstack([self.selected, w]),
            self.alpha + float(energies(w, A)[0]),
            self.beta + float(energies(w, B)[0]),
        )


def greedy_step(A, B, state):
    """Best unit vector orthogonal to ``state.selected``.

    With ``U`` an orthonormal basis of the complement of the selected
    vectors, the step maximizes
    ``(z^H U^H A U z + alpha) / (z^H U^H B U z + beta)`` over unit ``z``,
    which is the top generalized eigenvector of the pencil
    ``(U^H A U + alpha I, U^H B U + beta I)``. Returns ``U z``.
    """
    A = hermitian(A, "A")
    B = hermitian(B, "B")
    if A.shape != B.shape or A.shape[0] != state.nc:
        raise DimensionMismatch(f"A {A.shape}, B {B.shape}, state nc={state.nc}")
    nc = state.nc
    if state.count >= nc:
        raise SubspaceExhausted(f"all {nc} dimensions already selected")
    if state.count == 0:
        return solve_rank1(A, B)
    U = orthonormal_complement(state.selected)
    eye = np.eye(U.shape[1])
    Ar = U.conj().T @ A @ U + state.alpha * eye
    Br = U.conj().T @ B @ U + state.beta * eye
    w = U @ gevd(Ar, Br).eigenvectors[:, 0]
    return fix_phase(w / np.linalg.norm(w))


def solve_greedy(A, B, nv):
    """Forward greedy selection of ``nv`` weight vectors."""
    A = hermitian(A, "A")
    B = hermitian(B, "B")
    _check_nv(nv, A.shape[0])
    state = GreedyState.empty(A.shape[0])
    for _ in range(nv):
        state = state.extend(greedy_step(A, B, state), A, B)
    return WeightSet(state.selected, "greedy")


def solve(A, B, nv, method):
    if method == "original":
        return solve_original(A, B, nv)
    if method == "greedy":
        return solve_greedy(A, B, nv)
    raise ValidationError(f"unknown method {method!r}; expected one of {METHODS}")
