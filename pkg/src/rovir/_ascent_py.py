"""Pure-numpy projected trace-ratio ascent, vectorized over restarts.

Mirrors ``_ascent.pyx`` step for step; used when the extension is not built.
"""

import numpy as np

TINY_STEP = 1e-16
ARMIJO = 1e-4


def _orth(X):
    """Modified Gram-Schmidt with one reorthogonalization pass, batched over
    the leading axis. Returns ``(Q, ok)``; ``ok`` is False where a column
    collapsed."""
    Q = X.copy()
    R, m, k = Q.shape
    ok = np.ones(R, dtype=bool)
    for j in range(k):
        v = Q[:, :, j]
        for _ in range(2):
            for i in range(j):
                qi = Q[:, :, i]
                v = v - np.einsum("ra,ra->r", qi.conj(), v)[:, None] * qi
        nrm = np.sqrt(np.einsum("ra,ra->r", v.conj(), v).real)
        bad = ~(nrm > 1e-300)
        ok &= ~bad
        Q[:, :, j] = v / np.where(bad, 1.0, nrm)[:, None]
    return Q, ok


def _evaluate(Ar, Br, W, alpha0, beta0):
    AW = Ar @ W
    BW = Br @ W
    a = alpha0 + np.einsum("rij,rij->r", W.conj(), AW).real
    b = beta0 + np.einsum("rij,rij->r", W.conj(), BW).real
    return AW, BW, a, b


def _gradient(AW, BW, a, b):
    return 2.0 * (AW * b[:, None, None] - BW * a[:, None, None]) / (b * b)[:, None, None]


def _tangent_sq(W, G):
    """Squared norm of ``G`` projected onto the tangent space at orthonormal ``W``."""
    S = np.conj(np.swapaxes(W, 1, 2)) @ G
    H = 0.5 * (S + np.conj(np.swapaxes(S, 1, 2)))
    d = np.einsum("rij,rij->r", G.conj(), G).real - np.einsum("rij,rij->r", H.conj(), H).real
    return np.maximum(d, 0.0)


def ascend_batch(Ar, Br, W0, alpha0, beta0, max_iters, step, rel_tol):
    """Maximize ``(alpha0 + tr(W^H Ar W)) / (beta0 + tr(W^H Br W))`` from each
    orthonormal start ``W0[r]``.

    Returns the final iterates, their objective values and the number of
    iterations each restart used.
    """
    Ar = np.ascontiguousarray(Ar, dtype=np.complex128)
    Br = np.ascontiguousarray(Br, dtype=np.complex128)
    W = np.array(W0, dtype=np.complex128, copy=True)
    n_restarts = W.shape[0]
    AW, BW, a, b = _evaluate(Ar, Br, W, alpha0, beta0)
    f = a / b
    G = _gradient(AW, BW, a, b)
    gmax = np.abs(G).reshape(n_restarts, -1).max(axis=1)
    gsq = _tangent_sq(W, G)
    t = np.full(n_restarts, float(step))
    active = np.ones(n_restarts, dtype=bool)
    iters = np.zeros(n_restarts, dtype=np.int64)

    for _ in range(max_iters):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        iters[idx] += 1
        Wt, ok = _orth(W[idx] + t[idx, None, None] * G[idx])
        AWt, BWt, at, bt = _evaluate(Ar, Br, Wt, alpha0, beta0)
        ft = at / bt
        # sufficient increase, not just any increase
        better = ok & (ft > f[idx]) & (ft - f[idx] >= ARMIJO * t[idx] * gsq[idx])

        acc = idx[better]
        if acc.size:
            scale = np.abs(f[acc])
            rel = (ft[better] - f[acc]) / np.where(scale > 0, scale, 1.0)
            W[acc] = Wt[better]
            f[acc] = ft[better]
            G[acc] = _gradient(AWt[better], BWt[better], at[better], bt[better])
            gmax[acc] = np.abs(G[acc]).reshape(acc.size, -1).max(axis=1)
            gsq[acc] = _tangent_sq(W[acc], G[acc])
            t[acc] *= 2.0
            active[acc[rel < rel_tol]] = False

        rej = idx[~better]
        if rej.size:
            t[rej] *= 0.5
            active[rej[t[rej] * gmax[rej] < TINY_STEP]] = False

    return W, f, iters
