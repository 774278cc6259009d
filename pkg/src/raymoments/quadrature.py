"""Cached Gauss-Hermite rules for integrals against exp(-s^2).

An N-point rule integrates polynomials of degree up to 2N - 1 exactly,
so ``rule_size(deg)`` nodes are already exact with one node to spare;
doubling N must not change the result beyond roundoff.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def hermite_rule(npts: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the npts-point Gauss-Hermite rule (read-only)."""
    nodes, weights = np.polynomial.hermite.hermgauss(npts)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def rule_size(degree: int) -> int:
    """Node count exact for polynomial integrands up to ``degree``: ceil((degree+2)/2)."""
    if degree < 0:
        raise ValueError(f"degree must be nonnegative, got {degree}")
    return (degree + 3) // 2
