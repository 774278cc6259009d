"""Rank reduction: recovering tensor-indexed data from the top extension.

Given the homogeneous extension of the top momentum transform of rank-m
data, a symmetrized block of m mixed derivatives (split between x and
xi, weighted with transport powers) produces one function per sorted
index tuple.  These functions are superhomogeneous of degree -1 in xi,
are annihilated by the transport operator and by every John operator,
and coincide with the plain (order-0) ray transform of the corresponding
component field.  An equivalent form combines all m + 1 extensions with
alternating binomial weights; the two constructions follow different
computational paths through the summand calculus, so their agreement is
a genuine numerical check of the underlying operator identity.

Everything here requires the exact backend (transform representations);
callable-only data are rejected.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .gaussfield import GaussField
from .johnop import JohnChain, john_residual_chain
from .symtensor import coefficient_a, sorted_indices
from .xray import TransformRep, momentum_transform_batch


def _require_rep(obj) -> TransformRep:
    if not isinstance(obj, TransformRep):
        raise TypeError(
            "exact backend required: rank reduction operates on transform "
            f"representations, got {type(obj).__name__}"
        )
    return obj


def reduce_via_transport(psi_top: TransformRep, target: Sequence[int]) -> TransformRep:
    """Reduction from the top extension alone.

    Symmetrizes over the target tuple the sum over k of
    1/(m-k)! times (k x-derivatives, m-k xi-derivatives) applied after
    m-k transport applications, scaled by (-1)^m / m!.
    """
    _require_rep(psi_top)
    target = tuple(target)
    m = len(target)
    transported = [psi_top]
    for _ in range(m):
        transported.append(transported[-1].transport())
    perms = list(itertools.permutations(target))
    out = TransformRep(psi_top.n, [])
    for perm in perms:
        for k in range(m + 1):
            w = Fraction((-1) ** m, math.factorial(m) * len(perms) * math.factorial(m - k))
            piece = transported[m - k].derive(perm[:k], perm[k:])
            out = out + piece.scale(float(w))
    return out


def reduce_via_tuple(reps: Sequence[TransformRep], target: Sequence[int]) -> TransformRep:
    """Reduction from the whole tuple of extensions.

    Symmetrizes over the target tuple the alternating combination
    sum_k (-1)^k C(m,k) (k x-derivatives on extension k, the rest
    xi-derivatives), scaled by 1/m!.
    """
    target = tuple(target)
    m = len(target)
    if len(reps) != m + 1:
        raise ValueError(f"need {m + 1} extensions for a rank-{m} target, got {len(reps)}")
    for rep in reps:
        _require_rep(rep)
    n = reps[0].n
    perms = list(itertools.permutations(target))
    out = TransformRep(n, [])
    for perm in perms:
        for k in range(m + 1):
            w = Fraction((-1) ** k * math.comb(m, k), math.factorial(m) * len(perms))
            piece = reps[k].derive(perm[:k], perm[k:])
            out = out + piece.scale(float(w))
    return out


@dataclass
class ReductionReport:
    """Residuals of the defining properties of a reduced component."""

    target: tuple[int, ...]
    equivalence: float = 0.0
    homogeneity: float = 0.0
    transport: float = 0.0
    john: dict[tuple[int, int], float] = field(default_factory=dict)

    def max_residual(self) -> float:
        vals = [self.equivalence, self.homogeneity, self.transport, *self.john.values()]
        return max(vals) if vals else 0.0


def check_reduction_properties(reduced: TransformRep, xs: np.ndarray, xis: np.ndarray,
                               tvals: Sequence[float] = (-2.0, 0.5, 3.0)) -> ReductionReport:
    """Superhomogeneity of degree -1, transport annihilation, and John
    annihilation for a reduced component, as relative residuals."""
    values, scales = reduced.evaluate_batch(xs, xis)
    denom = np.maximum(1.0, np.maximum(np.abs(values), scales))

    hom = 0.0
    for t in tvals:
        tv, ts = reduced.evaluate_batch(xs, xis * t)
        hom = max(hom, float(np.max(np.abs(abs(t) * tv - values) / denom)))

    tr_vals, tr_scales = reduced.transport().evaluate_batch(xs, xis)
    transport_res = float(np.max(np.abs(tr_vals) / np.maximum(1.0, tr_scales)))

    john: dict[tuple[int, int], float] = {}
    for i in range(1, reduced.n + 1):
        for j in range(i + 1, reduced.n + 1):
            rep = john_residual_chain(reduced, JohnChain([(i, j)]), xs, xis)
            john[(i, j)] = rep.max_rel

    return ReductionReport(target=(), homogeneity=hom, transport=transport_res, john=john)


def reduction_equivalence(psi_reps: Sequence[TransformRep], target: Sequence[int],
                          xs: np.ndarray, xis: np.ndarray) -> tuple[float, TransformRep, TransformRep]:
    """Pointwise agreement of the two reduction constructions on a target tuple."""
    via_top = reduce_via_transport(psi_reps[-1], target)
    via_tuple = reduce_via_tuple(psi_reps, target)
    a_vals, a_scales = via_top.evaluate_batch(xs, xis)
    b_vals, b_scales = via_tuple.evaluate_batch(xs, xis)
    denom = np.maximum(1.0, np.maximum(a_scales, b_scales))
    res = float(np.max(np.abs(a_vals - b_vals) / denom))
    return res, via_top, via_tuple


def symmetry_residual(psi_top: TransformRep, target: Sequence[int],
                      xs: np.ndarray, xis: np.ndarray) -> float:
    """Agreement of reductions built for every ordering of the target tuple."""
    orderings = set(itertools.permutations(target))
    reference = None
    worst = 0.0
    for ordering in sorted(orderings):
        vals, scales = reduce_via_transport(psi_top, ordering).evaluate_batch(xs, xis)
        if reference is None:
            reference = vals
            denom = np.maximum(1.0, np.maximum(np.abs(vals), scales))
        else:
            worst = max(worst, float(np.max(np.abs(vals - reference) / denom)))
    return worst


def component_recovery_residual(f: GaussField, target: Sequence[int],
                                xs: np.ndarray, xis: np.ndarray) -> float:
    """The reduced component equals the order-0 transform of the matching
    component field of the original data."""
    reduced = reduce_via_transport(TransformRep.momentum(f.m, f), target)
    got, scales = reduced.evaluate_batch(xs, xis)
    want = momentum_transform_batch(0, f.component_field(tuple(target)), xs, xis)
    denom = np.maximum(1.0, np.maximum(np.abs(want), scales))
    return float(np.max(np.abs(got - want) / denom))


def transport_reduced_extension(psi_top: TransformRep, m: int, p: int) -> TransformRep:
    """The order-p extension rebuilt from the top one by transport powers."""
    if not 0 <= p <= m:
        raise ValueError(f"order {p} outside 0..{m}")
    coeff = Fraction((-1) ** (m - p), math.comb(m, p) * math.factorial(m - p))
    return psi_top.transport_power(m - p).scale(float(coeff))


@dataclass
class RecoveryReport:
    """Residuals of the derivative recovery identity for one (k, gamma)."""

    k: int
    gamma: tuple[int, ...]
    full_sum: float
    collapsed: float
    coefficients_vanish: bool


def check_recovery(f: GaussField, k: int, gamma: Sequence[int],
                   xs: np.ndarray, xis: np.ndarray) -> RecoveryReport:
    """k-fold x-derivatives of the order-k transform against the weighted
    mixed-derivative combination of transport-rebuilt extensions.

    The weights are the exact rational recovery coefficients; all of them
    with p < k vanish identically, so the combination collapses to the
    p = k term.  Both the full sum and the collapsed form are compared to
    the direct derivative.
    """
    m = f.m
    if not 0 <= k <= m:
        raise ValueError(f"order {k} outside 0..{m}")
    gamma = tuple(gamma)
    if len(gamma) != k:
        raise ValueError(f"need {k} derivative directions, got {len(gamma)}")

    lhs_vals, lhs_scales = TransformRep.momentum(k, f).derive(gamma, ()).evaluate_batch(xs, xis)

    psi_top = TransformRep.momentum(m, f)
    psi = [transport_reduced_extension(psi_top, m, p) for p in range(m + 1)]
    perms = list(itertools.permutations(gamma))

    full = TransformRep(f.n, [])
    for perm in perms:
        for p in range(k + 1):
            a = coefficient_a(m, k, p)
            if a == 0:
                continue
            full = full + psi[p].derive(perm[:p], perm[p:]).scale(float(a) / len(perms))
    collapsed = psi[k].derive(gamma, ())

    full_vals, full_scales = full.evaluate_batch(xs, xis)
    col_vals, col_scales = collapsed.evaluate_batch(xs, xis)
    denom_f = np.maximum(1.0, np.maximum(np.abs(lhs_vals) + lhs_scales, full_scales))
    denom_c = np.maximum(1.0, np.maximum(np.abs(lhs_vals) + lhs_scales, col_scales))

    return RecoveryReport(
        k=k,
        gamma=gamma,
        full_sum=float(np.max(np.abs(full_vals - lhs_vals) / denom_f)),
        collapsed=float(np.max(np.abs(col_vals - lhs_vals) / denom_c)),
        coefficients_vanish=all(coefficient_a(m, k, p) == 0 for p in range(k)) if k <= m else False,
    )


def recovery_targets(m: int, n: int, k: int) -> list[tuple[int, ...]]:
    """Sorted derivative tuples of length k for the recovery sweep."""
    return list(sorted_indices(k, n))
