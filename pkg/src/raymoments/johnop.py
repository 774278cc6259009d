"""John operators: the second-order range conditions for momentum line data.

The operator indexed by (i, j) is the antisymmetrized mixed derivative
d2/dx^i dxi^j - d2/dx^j dxi^i.  Chains of such operators of length m + 1
annihilate the homogeneous extension of the top momentum transform of
rank-m data; shorter chains applied to lower transforms obey a rank-
reduction pattern.  Two backends: exact (summand calculus on transform
representations) and nested central differences (any callable).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .xray import TransformRep

Pair = tuple[int, int]
PhaseFn = Callable[[np.ndarray, np.ndarray], complex]

MAX_FD_CHAIN = 3
DEFAULT_STEP = 1e-3


@dataclass(frozen=True)
class JohnChain:
    """An ordered product of John operators, canonicalized on construction.

    Each pair is stored with its smaller index first; every swap flips
    the overall sign.  A pair with equal indices makes the whole chain
    the zero operator.  Operator order is irrelevant analytically (the
    operators commute); the canonical form sorts pairs lexicographically.
    """

    pairs: tuple[Pair, ...]
    sign: int
    is_zero: bool

    def __init__(self, pairs: Sequence[Sequence[int]]):
        canon = []
        sign = 1
        zero = False
        for i, j in pairs:
            if i == j:
                zero = True
            elif i > j:
                i, j = j, i
                sign = -sign
            canon.append((int(i), int(j)))
        object.__setattr__(self, "pairs", tuple(sorted(canon)))
        object.__setattr__(self, "sign", sign)
        object.__setattr__(self, "is_zero", zero)

    def __len__(self) -> int:
        return len(self.pairs)

    def label(self) -> str:
        return "".join(f"({i},{j})" for i, j in self.pairs)


def enumerate_chains(n: int, length: int, cap: int | None = None) -> list[JohnChain]:
    """Canonical chains of a given length: multisets of index pairs i < j,
    in lexicographic order, optionally truncated at ``cap``."""
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    combos = itertools.combinations_with_replacement(pairs, length)
    if cap is not None:
        combos = itertools.islice(combos, cap)
    return [JohnChain(c) for c in combos]


def john_apply_exact(rep: TransformRep, pair: Sequence[int]) -> TransformRep:
    """One John operator applied to a transform representation."""
    i, j = pair
    if i == j:
        return TransformRep(rep.n, [])
    return rep.derive([i], [j]) - rep.derive([j], [i])


def chain_apply_exact(rep: TransformRep, chain: JohnChain) -> TransformRep:
    """A whole chain applied to a transform representation (sign included)."""
    if chain.is_zero:
        return TransformRep(rep.n, [])
    out = rep
    for pair in chain.pairs:
        out = john_apply_exact(out, pair)
    return out.scale(chain.sign)


@dataclass
class ChainReport:
    """Residuals of one chain at a batch of points."""

    chain: JohnChain
    max_abs: float
    max_rel: float
    rms_abs: float
    scale: float


def john_residual_chain(rep: TransformRep, chain: JohnChain, xs: np.ndarray, xis: np.ndarray) -> ChainReport:
    """Evaluate a chain on the exact backend and report how far from zero it is.

    The relative residual divides by max(1, sum of absolute summand
    contributions), the natural scale of the floating-point cancellation.
    """
    applied = chain_apply_exact(rep, chain)
    values, scales = applied.evaluate_batch(xs, xis)
    absvals = np.abs(values)
    rel = absvals / np.maximum(1.0, scales)
    return ChainReport(
        chain=chain,
        max_abs=float(absvals.max()) if absvals.size else 0.0,
        max_rel=float(rel.max()) if rel.size else 0.0,
        rms_abs=float(np.sqrt(np.mean(absvals**2))) if absvals.size else 0.0,
        scale=float(scales.max()) if scales.size else 0.0,
    )


def mixed_second_fd(fn: PhaseFn, i: int, j: int, x: np.ndarray, xi: np.ndarray, h: float) -> complex:
    """Central 4-point stencil for d2 fn / dx^i dxi^j, accurate to O(h^2)."""
    ei = np.zeros_like(x)
    ej = np.zeros_like(xi)
    ei[i - 1] = h
    ej[j - 1] = h
    return (
        fn(x + ei, xi + ej) - fn(x + ei, xi - ej) - fn(x - ei, xi + ej) + fn(x - ei, xi - ej)
    ) / (4.0 * h * h)


def john_apply_fd(fn: PhaseFn, pair: Sequence[int], x, xi, h: float = DEFAULT_STEP) -> complex:
    """One John operator by central differences on any phase-space callable."""
    i, j = pair
    if i == j:
        return 0j
    xv = np.asarray(x, dtype=float)
    xiv = np.asarray(xi, dtype=float)
    return mixed_second_fd(fn, i, j, xv, xiv, h) - mixed_second_fd(fn, j, i, xv, xiv, h)


def chain_apply_fd(fn: PhaseFn, chain: JohnChain, x, xi, h: float = DEFAULT_STEP,
                   max_length: int = MAX_FD_CHAIN) -> complex:
    """A chain by nested central differences.

    Cost grows as 8^length; lengths beyond ``max_length`` are refused
    explicitly rather than silently producing noise.
    """
    if len(chain.pairs) > max_length:
        raise ValueError(
            f"finite-difference chains longer than {max_length} are unsupported "
            f"(requested {len(chain.pairs)}); use the exact backend"
        )
    if chain.is_zero:
        return 0j
    fns: list[PhaseFn] = [fn]
    for pair in chain.pairs[:-1]:
        prev = fns[-1]

        def nested(x, xi, _prev=prev, _pair=pair):
            return john_apply_fd(_prev, _pair, x, xi, h)

        fns.append(nested)
    value = john_apply_fd(fns[-1], chain.pairs[-1], x, xi, h)
    return chain.sign * value


def fd_chain_residual(fn: PhaseFn, chain: JohnChain, points: Sequence[tuple[np.ndarray, np.ndarray]],
                      h: float = DEFAULT_STEP) -> float:
    """Max |chain fn| over sample points by finite differences."""
    return max(abs(chain_apply_fd(fn, chain, x, xi, h)) for x, xi in points)


def richardson_orders(errors: Sequence[float]) -> list[float]:
    """Observed convergence orders log2(e_h / e_{h/2}) for consecutive errors
    at step halvings."""
    orders = []
    for a, b in zip(errors, errors[1:]):
        if b == 0:
            raise ValueError("exact agreement reached; no order to estimate")
        orders.append(math.log2(a / b))
    return orders
