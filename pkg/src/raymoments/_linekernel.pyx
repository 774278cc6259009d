# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled line-transform kernel; mirrors kernels.numpy_backend exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, sqrt

cnp.import_array()


def line_transform_terms(
    const double complex[::1] coeffs,
    const cnp.int64_t[:, ::1] powers,
    const double[::1] widths,
    const double[:, ::1] centers,
    long p,
    const double[:, ::1] xs,
    const double[:, ::1] xis,
    const double[::1] nodes,
    const double[::1] weights,
):
    """Momentum-weighted line integrals of polynomial-Gaussian terms.

    Same contract as ``raymoments.kernels.numpy_backend.line_transform_terms``.
    """
    cdef Py_ssize_t T = coeffs.shape[0]
    cdef Py_ssize_t P = xs.shape[0]
    cdef Py_ssize_t n = xs.shape[1]
    cdef Py_ssize_t N = nodes.shape[0]
    cdef Py_ssize_t t, r, i, nu
    cdef long k, q
    cdef double a, sa, nxi2, nxi, wdot, w2, wi, tstar, dist2, gauss, scale
    cdef double s, base, prod, tval, tp, accum
    cdef double complex cf

    out_arr = np.zeros(P, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    norm2_arr = np.empty(P, dtype=np.float64)
    cdef double[::1] norm2 = norm2_arr
    u_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] u = u_arr
    v_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] v = v_arr

    if T == 0:
        return out_arr

    for r in range(P):
        nxi2 = 0.0
        for i in range(n):
            nxi2 += xis[r, i] * xis[r, i]
        norm2[r] = nxi2

    for t in range(T):
        a = widths[t]
        sa = sqrt(a)
        cf = coeffs[t]
        for r in range(P):
            nxi2 = norm2[r]
            nxi = sqrt(nxi2)
            wdot = 0.0
            w2 = 0.0
            for i in range(n):
                wi = xs[r, i] - centers[t, i]
                u[i] = wi
                wdot += wi * xis[r, i]
                w2 += wi * wi
            tstar = -wdot / nxi2
            dist2 = w2 - wdot * wdot / nxi2
            if dist2 < 0.0:
                dist2 = 0.0
            gauss = exp(-a * dist2)
            scale = 1.0 / (sa * nxi)
            for i in range(n):
                u[i] = u[i] + tstar * xis[r, i]
                v[i] = scale * xis[r, i]
            accum = 0.0
            for nu in range(N):
                s = nodes[nu]
                prod = 1.0
                for i in range(n):
                    k = powers[t, i]
                    if k > 0:
                        base = u[i] + s * v[i]
                        while k > 0:
                            prod *= base
                            k -= 1
                if p > 0:
                    tval = tstar + scale * s
                    tp = 1.0
                    q = p
                    while q > 0:
                        tp *= tval
                        q -= 1
                    prod *= tp
                accum += weights[nu] * prod
            out[r] = out[r] + cf * (scale * gauss * accum)

    return out_arr
