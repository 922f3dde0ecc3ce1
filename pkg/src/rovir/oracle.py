"""Reference maximizers for the retained-energy ratio.

:func:`stiefel_ascent` searches over orthonormal weight sets with many random
restarts of projected gradient ascent. It gives no optimality certificate,
but at desk scale (``nc <= 8``) with a moderately conditioned ``B`` it
reliably finds the global maximum and is used to check the solvers from
above. The ascent direction is not preconditioned, so the number of
iterations grows with the spread of ``B``'s spectrum; restarts that hit
``max_iters`` are reported through ``RestartResults.converged``. :func:`exhaustive_axis_oracle` is exact
for diagonal pencils.

The per-restart ascent loop is the hot path. It runs in the compiled
``rovir._ascent`` extension when that is built, otherwise in the numpy
implementation from ``rovir._ascent_py``; ``BACKEND`` records which one was
picked at import.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasiblePrefix, InvalidNv, NotDiagonal, ValidationError
from .linalg import hermitian, orthonormal_complement, orthonormalize
from .solvers import WeightSet, energies, sir

try:
    from ._ascent import ascend_batch
    BACKEND = "cython"
except ImportError:  # extension not built
    from ._ascent_py import ascend_batch
    BACKEND = "python"

__all__ = [
    "BACKEND",
    "OracleConfig",
    "RestartResults",
    "ascent_restarts",
    "stiefel_ascent",
    "exhaustive_axis_oracle",
]


@dataclass(frozen=True)
class OracleConfig:
    restarts: int = 200
    max_iters: int = 2000
    step: float = 0.1
    rel_tol: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValidationError("restarts and max_iters must be >= 1")
        if not self.rel_tol > 0 or not self.step > 0:
            raise ValidationError("rel_tol and step must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class RestartResults:
    """Everything one oracle run produced, restart by restart."""

    weights: WeightSet
    sir: float
    best_restart: int
    restart_sirs: np.ndarray
    iterations: np.ndarray
    max_iters: int

    @property
    def converged(self):
        """Whether the winning restart stopped before the iteration cap."""
        return bool(self.iterations[self.best_restart] < self.max_iters)


def start_point(seed, restart, m, k):
    """Orthonormalized complex Gaussian start for one restart.

    The stream depends only on ``(seed, restart)``, so restarts can be run in
    any order or in parallel without changing the result.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(restart,)))
    G = rng.standard_normal((m, k)) + 1j * rng.standard_normal((m, k))
    return orthonormalize(G)


def _prefix_columns(fixed_prefix, nc):
    if fixed_prefix is None:
        return np.zeros((nc, 0), dtype=np.complex128)
    P = fixed_prefix.vectors if isinstance(fixed_prefix, WeightSet) else fixed_prefix
    P = np.asarray(P, dtype=np.complex128)
    if P.ndim == 1:
        P = P[:, None]
    if P.shape[0] != nc:
        raise InfeasiblePrefix(f"prefix vectors have length {P.shape[0]}, expected {nc}")
    if P.shape[1] and np.max(np.abs(P.conj().T @ P - np.eye(P.shape[1]))) > 1e-8:
        raise InfeasiblePrefix("prefix vectors are not orthonormal")
    return P


def ascent_restarts(A, B, nv, cfg=None, fixed_prefix=None, ascend=None):
    """Run every restart and keep the per-restart values.

    ``ascend`` overrides the kernel (used to compare backends).
    """
    cfg = cfg or OracleConfig()
    ascend = ascend or ascend_batch
    A = hermitian(A, "A")
    B = hermitian(B, "B")
    nc = A.shape[0]
    if B.shape != A.shape:
        raise ValidationError(f"A is {A.shape} but B is {B.shape}")
    if isinstance(nv, bool) or not isinstance(nv, (int, np.integer)) or not 1 <= nv <= nc:
        raise InvalidNv(f"nv must lie in 1..{nc}, got {nv!r}")
    P = _prefix_columns(fixed_prefix, nc)
    p = P.shape[1]
    if p > nv:
        raise InfeasiblePrefix(f"prefix has {p} vectors but nv={nv}")
    if p == nv:
        W = WeightSet(P, "oracle")
        s = sir(W, A, B)
        return RestartResults(W, s, 0, np.full(cfg.restarts, s),
                              np.zeros(cfg.restarts, np.int64), cfg.max_iters)

    U = orthonormal_complement(P, nc)
    m, k = U.shape[1], nv - p
    Ar = hermitian(U.conj().T @ A @ U)
    Br = hermitian(U.conj().T @ B @ U)
    alpha0 = float(energies(P, A).sum()) if p else 0.0
    beta0 = float(energies(P, B).sum()) if p else 0.0

    W0 = np.stack([start_point(cfg.seed, r, m, k) for r in range(cfg.restarts)])
    Ws, vals, iters = ascend(Ar, Br, W0, alpha0, beta0, cfg.max_iters, cfg.step, cfg.rel_tol)
    best = int(np.argmax(vals))  # first maximum, i.e. lowest restart index on ties
    W = WeightSet(np.hstack([P, U @ Ws[best]]), "oracle")
    return RestartResults(W, sir(W, A, B), best, np.asarray(vals), np.asarray(iters),
                          cfg.max_iters)


def stiefel_ascent(A, B, nv, cfg=None, fixed_prefix=None):
    """Best orthonormal ``nc x nv`` weight set found by random-restart ascent.

    Parameters
    ----------
    A, B : (nc, nc) array_like
        Signal and interference Gram matrices.
    nv : int
        Number of weight vectors.
    cfg : OracleConfig, optional
    fixed_prefix : WeightSet or (nc, p) array, optional
        Orthonormal vectors held fixed; only the remaining ``nv - p`` columns
        are searched, inside the orthogonal complement of the prefix.

    Returns
    -------
    (WeightSet, float)
        The weights (prefix first) and their SIR.
    """
    res = ascent_restarts(A, B, nv, cfg, fixed_prefix)
    return res.weights, res.sir


def exhaustive_axis_oracle(A, B, nv):
    """Best axis-aligned subspace for a diagonal pencil, by enumeration.

    Returns the 0-based axis indices (sorted) and the ratio
    ``sum(a[S]) / sum(b[S])``. Ties keep the lexicographically first subset.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    for name, M in (("A", A), ("B", B)):
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise NotDiagonal(f"{name} must be square")
        if np.any(M[~np.eye(M.shape[0], dtype=bool)] != 0):
            raise NotDiagonal(f"{name} has nonzero off-diagonal entries")
    if A.shape != B.shape:
        raise ValidationError(f"A is {A.shape} but B is {B.shape}")
    nc = A.shape[0]
    if nc > 20:
        raise ValidationError(f"exhaustive enumeration limited to nc <= 20, got {nc}")
    if isinstance(nv, bool) or not isinstance(nv, (int, np.integer)) or not 1 <= nv <= nc:
        raise InvalidNv(f"nv must lie in 1..{nc}, got {nv!r}")
    a = np.diagonal(A).real.tolist()
    b = np.diagonal(B).real.tolist()
    best, best_val = None, -math.inf
    for subset in itertools.combinations(range(nc), nv):
        den = math.fsum(b[i] for i in subset)
        if den <= 0:
            continue
        val = math.fsum(a[i] for i in subset) / den
        if val > best_val:
            best, best_val = subset, val
    if best is None:
        raise ValidationError("B has no positive diagonal subset of the requested size")
    return best, best_val
