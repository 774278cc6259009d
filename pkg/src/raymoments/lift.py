"""Homogeneous extension of momentum line data off the line manifold.

A rank-m field produces m + 1 momentum transforms, known only on unit
directions with orthogonal base points.  The extension combines the
projected data with binomial weights in the orthogonality defect and a
homogenizing power of |xi|, producing functions of arbitrary (x, xi != 0)
that restrict back to the data, scale with a fixed parity-carrying
homogeneity in xi, and satisfy a binomial shift expansion along the line
direction.  For data that really come from a field, the extension of the
k-th transform coincides with the order-k momentum transform evaluated
off the manifold; that coincidence is the backbone cross-check.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .gaussfield import GaussField
from .weyl import Polynomial, tangent_x, tangent_xi
from .xray import TSPoint, TransformRep, momentum_transform, random_ts_points

Evaluator = Callable[[np.ndarray, np.ndarray], complex]

# inputs this close to the line manifold are treated as exactly on it,
# so the extension restricts to the data bitwise
SNAP_TOLERANCE = 1e-13


class MomentumDataSet:
    """The m + 1 momentum transforms of rank-m data on R^n.

    ``evaluators[k]`` is called with (x, xi) assumed on (or within
    roundoff of) the line manifold.  When the data come from an explicit
    field, exact transform representations are kept alongside for the
    derivative-level checks; synthetic callable data have ``reps=None``
    and only support finite-difference checking.
    """

    def __init__(self, m: int, n: int, evaluators: Sequence[Evaluator],
                 reps: Sequence[TransformRep] | None = None,
                 field: GaussField | None = None):
        if len(evaluators) != m + 1:
            raise ValueError(f"need {m + 1} evaluators for rank {m}, got {len(evaluators)}")
        self.m = m
        self.n = n
        self.evaluators = list(evaluators)
        self.reps = list(reps) if reps is not None else None
        self.field = field

    @classmethod
    def from_field(cls, f: GaussField) -> "MomentumDataSet":
        def make(k: int) -> Evaluator:
            return lambda x, xi: momentum_transform(k, f, x, xi)

        evaluators = [make(k) for k in range(f.m + 1)]
        reps = [TransformRep.momentum(k, f) for k in range(f.m + 1)]
        return cls(f.m, f.n, evaluators, reps=reps, field=f)

    @classmethod
    def from_callables(cls, m: int, n: int, fns: Sequence[Evaluator]) -> "MomentumDataSet":
        return cls(m, n, fns)

    def evenness_residual(self, points: Sequence[TSPoint]) -> float:
        """Max deviation from the parity law: the k-th transform picks up
        (-1)^(m-k) under direction reversal."""
        worst = 0.0
        for k, phi in enumerate(self.evaluators):
            sign = (-1) ** (self.m - k)
            for pt in points:
                a = phi(pt.x, pt.xi)
                b = phi(pt.x, -pt.xi)
                worst = max(worst, abs(b - sign * a) / max(1.0, abs(a)))
        return worst


def lift_psi(data: MomentumDataSet, k: int, x: Sequence[float], xi: Sequence[float]) -> complex:
    """Homogeneous extension of the k-th transform at arbitrary (x, xi != 0).

    Combines the data at the projected manifold point
    (x - <xi,x> xi / |xi|^2, xi / |xi|) with weights
    (-1)^(k-l) C(k,l) |xi|^l <xi,x>^(k-l) and the overall factor
    |xi|^(m-2k-1).  Inputs within ``SNAP_TOLERANCE`` of the manifold are
    snapped onto it, making the restriction exact.
    """
    if not 0 <= k <= data.m:
        raise ValueError(f"momentum index {k} outside 0..{data.m}")
    xv = np.asarray(x, dtype=float)
    xiv = np.asarray(xi, dtype=float)
    norm2 = float(xiv @ xiv)
    if norm2 == 0.0:
        raise ValueError("direction xi must be nonzero")
    dot = float(xiv @ xv)
    if abs(norm2 - 1.0) < SNAP_TOLERANCE:
        norm2 = 1.0
    if abs(dot) < SNAP_TOLERANCE:
        dot = 0.0
    norm = math.sqrt(norm2)
    x_proj = xv - (dot / norm2) * xiv
    xi_unit = xiv / norm
    total = 0j
    for l in range(k + 1):
        weight = (-1) ** (k - l) * math.comb(k, l) * norm**l * dot ** (k - l)
        if weight == 0.0:
            continue
        total += weight * data.evaluators[l](x_proj, xi_unit)
    return norm ** (data.m - 2 * k - 1) * total


def lift_callable(data: MomentumDataSet, k: int) -> Evaluator:
    """The extension of the k-th transform as a plain (x, xi) callable."""
    return lambda x, xi: lift_psi(data, k, x, xi)


def check_restriction(data: MomentumDataSet, k: int, points: Sequence[TSPoint]) -> float:
    """Max |extension - data| on the manifold itself; exactly zero by construction."""
    worst = 0.0
    for pt in points:
        worst = max(worst, abs(lift_psi(data, k, pt.x, pt.xi) - data.evaluators[k](pt.x, pt.xi)))
    return worst


def check_homogeneity(data: MomentumDataSet, k: int, xs: np.ndarray, xis: np.ndarray,
                      tvals: Sequence[float] = (-2.0, -1.0, 0.5, 3.0)) -> float:
    """Max residual of the scaling law: extension at (x, t xi) equals
    t^(m-k) |t|^(-1) times the extension at (x, xi)."""
    worst = 0.0
    for xv, xiv in zip(xs, xis):
        base = lift_psi(data, k, xv, xiv)
        for t in tvals:
            lhs = lift_psi(data, k, xv, t * xiv)
            rhs = t ** (data.m - k) / abs(t) * base
            worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return worst


def check_shift(data: MomentumDataSet, k: int, xs: np.ndarray, xis: np.ndarray,
                tvals: Sequence[float] = (-1.5, -0.4, 0.7, 2.0)) -> float:
    """Max residual of the shift expansion: extension of order k at
    (x + t xi, xi) equals sum_l C(k,l) (-t)^(k-l) times order-l extensions at (x, xi)."""
    worst = 0.0
    for xv, xiv in zip(xs, xis):
        lower = [lift_psi(data, l, xv, xiv) for l in range(k + 1)]
        for t in tvals:
            lhs = lift_psi(data, k, xv + t * xiv, xiv)
            rhs = sum(math.comb(k, l) * (-t) ** (k - l) * lower[l] for l in range(k + 1))
            worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return worst


def check_extension_matches_transform(data: MomentumDataSet, k: int,
                                      xs: np.ndarray, xis: np.ndarray) -> float:
    """Max residual between the extension and the off-manifold momentum
    transform of the underlying field (exact backend required)."""
    if data.field is None:
        raise ValueError("exact backend required: data has no underlying field")
    worst = 0.0
    for xv, xiv in zip(xs, xis):
        lifted = lift_psi(data, k, xv, xiv)
        direct = momentum_transform(k, data.field, xv, xiv)
        worst = max(worst, abs(lifted - direct) / max(1.0, abs(direct)))
    return worst


def transport_ladder_residual(data: MomentumDataSet, k: int, l: int,
                              xs: np.ndarray, xis: np.ndarray) -> float:
    """Residual of the transport ladder on exact transform data.

    Applying the transport operator l times to the order-k extension
    yields (-1)^l C(k,l) l! times the order-(k-l) extension, and zero
    once l exceeds k.  Transport is expanded at the derivative level (no
    momentum-weight shortcut), so this exercises the summand calculus.
    """
    if data.reps is None:
        raise ValueError("exact backend required: data has no transform representations")
    rep = data.reps[k].transport_power(l)
    values, scales = rep.evaluate_batch(xs, xis)
    if l > k:
        return float(np.max(np.abs(values) / np.maximum(1.0, scales)))
    coeff = (-1) ** l * math.comb(k, l) * math.factorial(l)
    target, _ = data.reps[k - l].evaluate_batch(xs, xis)
    target = coeff * target
    denom = np.maximum(np.maximum(1.0, np.abs(target)), scales)
    return float(np.max(np.abs(values - target) / denom))


def _constraint_polynomials(n: int) -> tuple[Polynomial, Polynomial]:
    """The defining functions of the line manifold: |xi|^2 - 1 and <x, xi>."""
    zero = (0,) * n
    sphere: Polynomial = {(zero, zero): Fraction(-1)}
    ortho: Polynomial = {}
    for i in range(n):
        e = tuple(1 if j == i else 0 for j in range(n))
        sphere[(zero, tuple(2 if j == i else 0 for j in range(n)))] = Fraction(1)
        ortho[(e, e)] = Fraction(1)
    return sphere, ortho


def _eval_polynomial(poly: Polynomial, x: np.ndarray, xi: np.ndarray) -> float:
    total = 0.0
    for (A, B), cf in poly.items():
        mono = float(cf)
        for i, a in enumerate(A):
            if a:
                mono *= x[i] ** a
        for i, b in enumerate(B):
            if b:
                mono *= xi[i] ** b
        total += mono
    return total


def tangency_check(i: int, points: Sequence[TSPoint]) -> float:
    """Max value of both projected first-order operators applied to both
    manifold constraints, evaluated at the sample points.

    The operators are expanded exactly in the operator algebra and the
    resulting polynomials evaluated in floats, so the result is roundoff
    plus the manifold tolerance of the points themselves.
    """
    if not points:
        raise ValueError("need at least one sample point")
    n = points[0].n
    if not 1 <= i <= n:
        raise ValueError(f"direction {i} outside 1..{n}")
    sphere, ortho = _constraint_polynomials(n)
    worst = 0.0
    for op in (tangent_x(n, i), tangent_xi(n, i)):
        for constraint in (sphere, ortho):
            applied = op.apply(constraint)
            for pt in points:
                worst = max(worst, abs(_eval_polynomial(applied, pt.x, pt.xi)))
    return worst


def sample_points(n: int, count: int, seed: int) -> list[TSPoint]:
    """Deterministic manifold sample points."""
    return random_ts_points(n, count, np.random.default_rng(seed))


__all__ = [
    "MomentumDataSet",
    "lift_psi",
    "lift_callable",
    "check_restriction",
    "check_homogeneity",
    "check_shift",
    "check_extension_matches_transform",
    "transport_ladder_residual",
    "tangency_check",
    "sample_points",
]
