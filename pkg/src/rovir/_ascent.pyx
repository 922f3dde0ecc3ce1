# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled projected trace-ratio ascent.

Same iteration as ``_ascent_py.ascend_batch``; restarts run one after another
with the GIL released.
"""

import numpy as np

from libc.math cimport fabs, sqrt

ctypedef double complex cplx

cdef double TINY_STEP = 1e-16
cdef double ARMIJO = 1e-4


cdef inline double _cdot_re(const cplx* x, const cplx* y, Py_ssize_t stride, Py_ssize_t m) noexcept nogil:
    # Re(x^H y) for strided columns
    cdef Py_ssize_t a
    cdef double s = 0.0
    for a in range(m):
        s += x[a * stride].real * y[a * stride].real + x[a * stride].imag * y[a * stride].imag
    return s


cdef inline cplx _cdot(const cplx* x, const cplx* y, Py_ssize_t stride, Py_ssize_t m) noexcept nogil:
    # x^H y for strided columns
    cdef Py_ssize_t a
    cdef double re = 0.0, im = 0.0
    cdef double xr, xi, yr, yi
    for a in range(m):
        xr = x[a * stride].real
        xi = x[a * stride].imag
        yr = y[a * stride].real
        yi = y[a * stride].imag
        re += xr * yr + xi * yi
        im += xr * yi - xi * yr
    return re + 1j * im


cdef bint _orth(cplx[:, ::1] Q, Py_ssize_t m, Py_ssize_t k) noexcept nogil:
    cdef Py_ssize_t i, j, a, p
    cdef cplx c
    cdef double nrm
    for j in range(k):
        for p in range(2):
            for i in range(j):
                c = _cdot(&Q[0, i], &Q[0, j], k, m)
                for a in range(m):
                    Q[a, j] = Q[a, j] - c * Q[a, i]
        nrm = sqrt(_cdot_re(&Q[0, j], &Q[0, j], k, m))
        if not nrm > 1e-300:
            return False
        for a in range(m):
            Q[a, j] = Q[a, j] / nrm
    return True


cdef double _apply(const cplx[:, ::1] M, const cplx[:, ::1] X, cplx[:, ::1] out,
                   Py_ssize_t m, Py_ssize_t k) noexcept nogil:
    # out = M @ X; returns Re tr(X^H M X)
    cdef Py_ssize_t a, c, j
    cdef cplx s
    cdef double tr = 0.0
    for a in range(m):
        for j in range(k):
            s = 0.0
            for c in range(m):
                s = s + M[a, c] * X[c, j]
            out[a, j] = s
            tr += X[a, j].real * s.real + X[a, j].imag * s.imag
    return tr


cdef double _gradient(const cplx[:, ::1] AW, const cplx[:, ::1] BW, double a, double b,
                      cplx[:, ::1] G, Py_ssize_t m, Py_ssize_t k) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double gmax = 0.0, mag
    cdef double scale = 2.0 / (b * b)
    for i in range(m):
        for j in range(k):
            G[i, j] = (AW[i, j] * b - BW[i, j] * a) * scale
            mag = sqrt(G[i, j].real * G[i, j].real + G[i, j].imag * G[i, j].imag)
            if mag > gmax:
                gmax = mag
    return gmax


cdef double _tangent_sq(const cplx[:, ::1] W, const cplx[:, ::1] G,
                        Py_ssize_t m, Py_ssize_t k) noexcept nogil:
    # ||G - W herm(W^H G)||^2 = ||G||^2 - ||herm(W^H G)||^2 for orthonormal W
    cdef Py_ssize_t i, j
    cdef double g2 = 0.0, h2 = 0.0
    cdef cplx h
    for j in range(k):
        g2 += _cdot_re(&G[0, j], &G[0, j], k, m)
        for i in range(k):
            h = 0.5 * (_cdot(&W[0, i], &G[0, j], k, m) + _cdot(&G[0, i], &W[0, j], k, m))
            h2 += h.real * h.real + h.imag * h.imag
    return g2 - h2 if g2 > h2 else 0.0


cdef long _ascend_one(const cplx[:, ::1] Ar, const cplx[:, ::1] Br, cplx[:, ::1] W,
                      double alpha0, double beta0, long max_iters, double step, double rel_tol,
                      cplx[:, ::1] AW, cplx[:, ::1] BW, cplx[:, ::1] G,
                      cplx[:, ::1] Wt, cplx[:, ::1] AWt, cplx[:, ::1] BWt,
                      double* f_out) noexcept nogil:
    cdef Py_ssize_t m = W.shape[0], k = W.shape[1], i, j
    cdef double a, b, f, at = 0.0, bt = 1.0, ft = 0.0, rel, scale, gmax, gsq
    cdef double t = step
    cdef long it = 0
    cdef bint ok

    a = alpha0 + _apply(Ar, W, AW, m, k)
    b = beta0 + _apply(Br, W, BW, m, k)
    f = a / b
    gmax = _gradient(AW, BW, a, b, G, m, k)
    gsq = _tangent_sq(W, G, m, k)

    while it < max_iters:
        it += 1
        for i in range(m):
            for j in range(k):
                Wt[i, j] = W[i, j] + t * G[i, j]
        ok = _orth(Wt, m, k)
        if ok:
            at = alpha0 + _apply(Ar, Wt, AWt, m, k)
            bt = beta0 + _apply(Br, Wt, BWt, m, k)
            ft = at / bt
        if ok and ft > f and ft - f >= ARMIJO * t * gsq:
            scale = fabs(f)
            if not scale > 0:
                scale = 1.0
            rel = (ft - f) / scale
            W[:, :] = Wt
            AW[:, :] = AWt
            BW[:, :] = BWt
            a = at
            b = bt
            f = ft
            gmax = _gradient(AW, BW, a, b, G, m, k)
            gsq = _tangent_sq(W, G, m, k)
            t *= 2.0
            if rel < rel_tol:
                break
        else:
            t *= 0.5
            if t * gmax < TINY_STEP:
                break
    f_out[0] = f
    return it


def ascend_batch(Ar, Br, W0, double alpha0, double beta0, long max_iters, double step, double rel_tol):
    """Maximize ``(alpha0 + tr(W^H Ar W)) / (beta0 + tr(W^H Br W))`` from each
    orthonormal start ``W0[r]``.

    Returns the final iterates, their objective values and the number of
    iterations each restart used.
    """
    cdef const cplx[:, ::1] A_v = np.ascontiguousarray(Ar, dtype=np.complex128)
    cdef const cplx[:, ::1] B_v = np.ascontiguousarray(Br, dtype=np.complex128)
    W_all = np.array(W0, dtype=np.complex128, copy=True, order="C")
    cdef Py_ssize_t R = W_all.shape[0], m = W_all.shape[1], k = W_all.shape[2], r
    vals = np.empty(R, dtype=np.float64)
    iters = np.empty(R, dtype=np.int64)
    cdef cplx[:, :, ::1] W_v = W_all
    cdef double[::1] vals_v = vals
    cdef long long[::1] iters_v = iters
    cdef cplx[:, ::1] AW = np.empty((m, k), dtype=np.complex128)
    cdef cplx[:, ::1] BW = np.empty((m, k), dtype=np.complex128)
    cdef cplx[:, ::1] G = np.empty((m, k), dtype=np.complex128)
    cdef cplx[:, ::1] Wt = np.empty((m, k), dtype=np.complex128)
    cdef cplx[:, ::1] AWt = np.empty((m, k), dtype=np.complex128)
    cdef cplx[:, ::1] BWt = np.empty((m, k), dtype=np.complex128)
    cdef double fval
    with nogil:
        for r in range(R):
            iters_v[r] = _ascend_one(A_v, B_v, W_v[r], alpha0, beta0, max_iters, step, rel_tol,
                                     AW, BW, G, Wt, AWt, BWt, &fval)
            vals_v[r] = fval
    return W_all, vals, iters
