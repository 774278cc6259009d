"""Vectorized NumPy implementation of the line-transform kernel.

This is the reference backend; the compiled extension must agree with it
to roundoff.  See ``raymoments.kernels`` for dispatch.
"""

from __future__ import annotations

import numpy as np


def line_transform_terms(
    coeffs: np.ndarray,
    powers: np.ndarray,
    widths: np.ndarray,
    centers: np.ndarray,
    p: int,
    xs: np.ndarray,
    xis: np.ndarray,
    nodes: np.ndarray,
    weights: np.ndarray,
) -> np.ndarray:
    """Momentum-weighted line integrals of polynomial-Gaussian terms.

    For each point (xs[r], xis[r]) returns

        sum_t integral t^p coeffs[t] prod_i (x_i + t xi_i - c_i)^powers[t,i]
                       exp(-widths[t] |x + t xi - c|^2) dt

    evaluated by completing the square along the line and applying the
    supplied Gauss-Hermite rule, which must be exact for the polynomial
    degree max |powers| + p.

    Parameters
    ----------
    coeffs : complex (T,)
    powers : int (T, n)
    widths : float (T,)
    centers : float (T, n)
    p : int, momentum exponent >= 0
    xs, xis : float (P, n), line base points and nonzero directions
    nodes, weights : float (N,), Gauss-Hermite rule for weight exp(-s^2)

    Returns
    -------
    complex (P,)
    """
    T = coeffs.shape[0]
    P = xs.shape[0]
    if T == 0:
        return np.zeros(P, dtype=complex)

    nxi2 = np.einsum("pi,pi->p", xis, xis)  # (P,)
    nxi = np.sqrt(nxi2)
    w = xs[None, :, :] - centers[:, None, :]  # (T, P, n)
    wdot = np.einsum("tpi,pi->tp", w, xis)  # (T, P)
    w2 = np.einsum("tpi,tpi->tp", w, w)
    tstar = -wdot / nxi2[None, :]
    # distance^2 from the center to the line; clip tiny negatives from roundoff
    dist2 = np.maximum(w2 - wdot * wdot / nxi2[None, :], 0.0)
    gauss = np.exp(-widths[:, None] * dist2)
    scale = 1.0 / (np.sqrt(widths)[:, None] * nxi[None, :])  # (T, P)

    u = w + tstar[:, :, None] * xis[None, :, :]  # (T, P, n): foot of the line
    v = scale[:, :, None] * xis[None, :, :]  # (T, P, n): per-node direction step

    base = u[:, :, :, None] + v[:, :, :, None] * nodes[None, None, None, :]  # (T, P, n, N)
    poly = np.prod(base ** powers[:, None, :, None].astype(float), axis=2)  # (T, P, N)
    if p > 0:
        tvals = tstar[:, :, None] + scale[:, :, None] * nodes[None, None, :]
        poly = poly * tvals**p
    quad = poly @ weights  # (T, P)

    return np.einsum("t,tp->p", coeffs, scale * gauss * quad)
