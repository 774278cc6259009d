"""Shared fixtures and brute-force oracles.

The oracles here are deliberately naive (dense grids, direct sums over
permutations) and independent of the package's fast paths; several
expected values frozen into the tests were computed with them.
"""

from __future__ import annotations

import numpy as np
import pytest

from raymoments.gaussfield import GaussField
from raymoments.symtensor import multiplicity, sorted_indices


def brute_line_integral(field: GaussField, p: int, x: np.ndarray, xi: np.ndarray,
                        halfwidth: float = 40.0, samples: int = 400_001) -> complex:
    """Dense-trapezoid momentum line integral; slow but assumption-free."""
    t = np.linspace(-halfwidth, halfwidth, samples)
    pts = x[None, :] + t[:, None] * xi[None, :]
    total = np.zeros(samples, dtype=complex)
    for idx in sorted_indices(field.m, field.n):
        comp = np.zeros(samples, dtype=complex)
        for term in field.terms(idx):
            cf, power, width, center = term.coeff, term.power, term.width, term.center
            w = pts - np.asarray(center)
            mono = np.ones(samples)
            for ax, e in enumerate(power):
                if e:
                    mono = mono * w[:, ax] ** e
            comp += cf * mono * np.exp(-width * np.einsum("ti,ti->t", w, w))
        if field.m:
            mono = 1.0
            for i in idx:
                mono *= xi[i - 1]
            comp = comp * mono
        total += multiplicity(idx) * comp
    if p:
        total = total * t**p
    return complex(np.trapezoid(total, t))


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240814)
