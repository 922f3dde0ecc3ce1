"""Dense complex Hermitian kernels: Cholesky, generalized eigendecomposition,
orthonormal bases and their complements.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.
:func:`hermitian` is the gatekeeper that turns arbitrary square input into
an exactly Hermitian array; every public routine that takes a Gram matrix
passes it through there first.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DimensionError, DimensionMismatch, NotPositiveDefinite, RankDeficient

__all__ = [
    "GevdResult",
    "hermitian",
    "cholesky",
    "gevd",
    "orthonormal_complement",
    "orthonormalize",
    "fix_phase",
]

RANK_TOL = 1e-10


def hermitian(M, name="matrix"):
    """Return ``(M + M^H) / 2`` as a complex128 array.

    The result is Hermitian bit-for-bit (``H[i, j] == conj(H[j, i])``).
    """
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise DimensionMismatch(f"{name} has non-finite entries")
    return 0.5 * (M + M.conj().T)


def cholesky(B):
    """Lower-triangular ``L`` with ``L @ L^H == B`` and a real positive diagonal.

    Raises
    ------
    NotPositiveDefinite
        If a non-positive pivot is met.
    """
    B = hermitian(B, "B")
    try:
        L = np.linalg.cholesky(B)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(
            "B is not positive definite; regularize it before factorizing"
        ) from exc
    d = L.diagonal().real
    if not np.all(d > 0) or not np.all(np.isfinite(d)):
        raise NotPositiveDefinite("Cholesky produced a non-positive pivot")
    return L


def fix_phase(V):
    """Rotate each column so its largest-magnitude entry is real and positive.

    Ties in magnitude go to the lowest row index.
    """
    V = np.array(V, dtype=np.complex128, copy=True)
    if V.ndim == 1:
        return fix_phase(V[:, None])[:, 0]
    idx = np.argmax(np.abs(V), axis=0)
    pivots = V[idx, np.arange(V.shape[1])]
    mag = np.abs(pivots)
    phase = np.where(mag > 0, pivots.conj() / np.where(mag > 0, mag, 1.0), 1.0)
    V *= phase[None, :]
    V[idx, np.arange(V.shape[1])] = np.abs(V[idx, np.arange(V.shape[1])])
    return V


@dataclass(frozen=True)
class GevdResult:
    """Generalized eigenpairs of a Hermitian pencil ``(A, B)``.

    ``eigenvalues`` is real and descending; ``eigenvectors[:, j]`` has unit
    Euclidean norm and pairs with ``eigenvalues[j]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self):
        return self.eigenvalues.shape[0]

    def top(self, k):
        return self.eigenvectors[:, :k]


def gevd(A, B):
    """Solve ``A v = lambda B v`` for Hermitian ``A`` and positive definite ``B``.

    The pencil is whitened with the Cholesky factor of ``B``: the Hermitian
    matrix ``L^-1 A L^-H`` is eigendecomposed and its eigenvectors are mapped
    back through ``L^-H``. This keeps the inner problem Hermitian, unlike
    forming ``B^-1 A``.

    Returns
    -------
    GevdResult
        Eigenvalues in descending order (exact ties keep the order LAPACK
        produced), unit-norm eigenvectors with :func:`fix_phase` applied.
    """
    A = hermitian(A, "A")
    B = hermitian(B, "B")
    if A.shape != B.shape:
        raise DimensionMismatch(f"A is {A.shape} but B is {B.shape}")
    L = cholesky(B)
    C = solve_triangular(L, A, lower=True)
    C = solve_triangular(L, C.conj().T, lower=True).conj().T
    lam, Y = np.linalg.eigh(hermitian(C))
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    V = solve_triangular(L.conj().T, Y[:, order], lower=False)
    V /= np.linalg.norm(V, axis=0)[None, :]
    return GevdResult(eigenvalues=lam, eigenvectors=fix_phase(V))


def orthonormal_complement(V, n=None):
    """Orthonormal basis for the orthogonal complement of ``span(V)``.

    ``V`` is ``n x k`` with orthonormal columns; the result is
    ``n x (n - k)`` and ``[V U]`` is unitary. Computed from the full SVD.
    Pass ``n`` when ``V`` has no columns and so cannot carry its own height.
    """
    V = np.asarray(V, dtype=np.complex128)
    if V.ndim == 1:
        V = V[:, None]
    if n is None:
        n = V.shape[0]
    elif V.size and V.shape[0] != n:
        raise DimensionMismatch(f"V has {V.shape[0]} rows, expected {n}")
    k = V.shape[1] if V.size else 0
    if k >= n:
        raise DimensionError(f"no complement: k={k} >= n={n}")
    if k == 0:
        return np.eye(n, dtype=np.complex128)
    U = np.linalg.svd(V, full_matrices=True)[0]
    return np.ascontiguousarray(U[:, k:])


def orthonormalize(W):
    """Order-preserving QR of the columns of ``W``.

    Column ``j`` of the result spans the same flag as columns ``1..j`` of the
    input, and has a positive real inner product with input column ``j``; an
    already-orthonormal input comes back unchanged up to rounding.

    Raises
    ------
    RankDeficient
        If the smallest singular value is below ``1e-10`` times the largest.
    """
    W = np.asarray(W, dtype=np.complex128)
    if W.ndim == 1:
        W = W[:, None]
    n, k = W.shape
    if k > n:
        raise RankDeficient(f"{k} columns cannot be independent in C^{n}")
    s = np.linalg.svd(W, compute_uv=False)
    if s.size == 0 or s[0] == 0 or s[-1] < RANK_TOL * s[0]:
        raise RankDeficient("columns are linearly dependent to tolerance 1e-10")
    Q, R = np.linalg.qr(W)
    d = R.diagonal()
    return Q * (d / np.abs(d))[None, :]
