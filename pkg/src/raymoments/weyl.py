"""Exact operator algebra on polynomials in (x, xi) over R^n + R^n.

Elements are finite rational combinations of normal-ordered words

    x^alpha xi^beta d_x^gamma d_xi^delta

(multiplication operators to the left of derivatives).  Products are
normal-ordered exactly, so operator identities can be verified as
literal equality of coefficient tables, and independently by acting on
random rational polynomials.

The identities of interest: commuting a power of the transport operator
sum_i xi_i d/dx^i past a block of xi-derivatives, and the symmetrized
variant that drives the rank-reduction construction.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

Pow = tuple[int, ...]
TermKey = tuple[Pow, Pow, Pow, Pow]  # (x-mult, xi-mult, x-deriv, xi-deriv)
Polynomial = dict[tuple[Pow, Pow], Fraction]


def _falling(a: int, k: int) -> int:
    """a (a-1) ... (a-k+1); equals 0 when k > a."""
    out = 1
    for j in range(k):
        out *= a - j
    return out


def _zeros(n: int) -> Pow:
    return (0,) * n


def _bump(base: Pow, i: int, by: int = 1) -> Pow:
    return base[: i - 1] + (base[i - 1] + by,) + base[i:]


class WeylElement:
    """Normal-ordered operator with exact rational coefficients."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[TermKey, Fraction] | None = None):
        self.n = n
        clean: dict[TermKey, Fraction] = {}
        if terms:
            for key, cf in terms.items():
                cf = Fraction(cf)
                if cf:
                    clean[key] = cf
        self.terms = clean

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "WeylElement":
        return cls(n)

    @classmethod
    def scalar(cls, n: int, c) -> "WeylElement":
        return cls(n, {(_zeros(n),) * 4: Fraction(c)})

    @classmethod
    def x(cls, n: int, i: int) -> "WeylElement":
        z = _zeros(n)
        return cls(n, {(_bump(z, i), z, z, z): Fraction(1)})

    @classmethod
    def xi(cls, n: int, i: int) -> "WeylElement":
        z = _zeros(n)
        return cls(n, {(z, _bump(z, i), z, z): Fraction(1)})

    @classmethod
    def dx(cls, n: int, i: int) -> "WeylElement":
        z = _zeros(n)
        return cls(n, {(z, z, _bump(z, i), z): Fraction(1)})

    @classmethod
    def dxi(cls, n: int, i: int) -> "WeylElement":
        z = _zeros(n)
        return cls(n, {(z, z, z, _bump(z, i)): Fraction(1)})

    # -- ring operations -----------------------------------------------

    def __add__(self, other: "WeylElement") -> "WeylElement":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        out = dict(self.terms)
        for key, cf in other.terms.items():
            out[key] = out.get(key, Fraction(0)) + cf
        return WeylElement(self.n, out)

    def __sub__(self, other: "WeylElement") -> "WeylElement":
        return self + other.scale(-1)

    def scale(self, c) -> "WeylElement":
        c = Fraction(c)
        return WeylElement(self.n, {k: c * v for k, v in self.terms.items()})

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        """Normal-ordered product.

        Within each sector the derivative block of the left factor is
        commuted past the multiplication block of the right factor via
        the Leibniz rule; the x and xi sectors commute with each other.
        """
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        n = self.n
        out: dict[TermKey, Fraction] = {}
        for (a1, b1, g1, d1), c1 in self.terms.items():
            for (a2, b2, g2, d2), c2 in other.terms.items():
                base = c1 * c2
                xranges = [range(min(g1[i], a2[i]) + 1) for i in range(n)]
                for kx in itertools.product(*xranges):
                    factx = base
                    for i in range(n):
                        if kx[i]:
                            factx *= math.comb(g1[i], kx[i]) * _falling(a2[i], kx[i])
                    xiranges = [range(min(d1[i], b2[i]) + 1) for i in range(n)]
                    for kxi in itertools.product(*xiranges):
                        fact = factx
                        for i in range(n):
                            if kxi[i]:
                                fact *= math.comb(d1[i], kxi[i]) * _falling(b2[i], kxi[i])
                        key = (
                            tuple(a1[i] + a2[i] - kx[i] for i in range(n)),
                            tuple(b1[i] + b2[i] - kxi[i] for i in range(n)),
                            tuple(g1[i] + g2[i] - kx[i] for i in range(n)),
                            tuple(d1[i] + d2[i] - kxi[i] for i in range(n)),
                        )
                        out[key] = out.get(key, Fraction(0)) + fact
        return WeylElement(n, out)

    def __pow__(self, k: int) -> "WeylElement":
        if k < 0:
            raise ValueError("negative operator power")
        out = WeylElement.scalar(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other: object) -> bool:
        return isinstance(other, WeylElement) and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        raise TypeError("WeylElement is mutable-adjacent; not hashable")

    def __repr__(self) -> str:
        return f"WeylElement(n={self.n}, {len(self.terms)} terms)"

    # -- action on polynomials ------------------------------------------

    def apply(self, poly: Polynomial) -> Polynomial:
        """Act on a rational polynomial given as {(x-pow, xi-pow): coeff}."""
        n = self.n
        out: Polynomial = {}
        for (a, b, g, d), cf in self.terms.items():
            for (A, B), pc in poly.items():
                fact = cf * pc
                ok = True
                for i in range(n):
                    if g[i] > A[i] or d[i] > B[i]:
                        ok = False
                        break
                    if g[i]:
                        fact *= _falling(A[i], g[i])
                    if d[i]:
                        fact *= _falling(B[i], d[i])
                if not ok or fact == 0:
                    continue
                key = (
                    tuple(A[i] - g[i] + a[i] for i in range(n)),
                    tuple(B[i] - d[i] + b[i] for i in range(n)),
                )
                out[key] = out.get(key, Fraction(0)) + fact
        return {k: v for k, v in out.items() if v}


# -- named operators -----------------------------------------------------


def transport(n: int) -> WeylElement:
    """sum_i xi_i d/dx^i, the derivative along the line direction."""
    out = WeylElement.zero(n)
    for i in range(1, n + 1):
        out = out + WeylElement.xi(n, i) * WeylElement.dx(n, i)
    return out


def xi_euler(n: int) -> WeylElement:
    """sum_i xi_i d/dxi^i, the homogeneity-counting operator in xi."""
    out = WeylElement.zero(n)
    for i in range(1, n + 1):
        out = out + WeylElement.xi(n, i) * WeylElement.dxi(n, i)
    return out


def john(n: int, i: int, j: int) -> WeylElement:
    """Mixed-derivative antisymmetry operator d2/dx^i dxi^j - d2/dx^j dxi^i."""
    return WeylElement.dx(n, i) * WeylElement.dxi(n, j) - WeylElement.dx(n, j) * WeylElement.dxi(n, i)


def tangent_x(n: int, i: int) -> WeylElement:
    """x-derivative projected tangent to the line manifold."""
    return WeylElement.dx(n, i) - WeylElement.xi(n, i) * transport(n)


def tangent_xi(n: int, i: int) -> WeylElement:
    """xi-derivative projected tangent to the line manifold."""
    return (
        WeylElement.dxi(n, i)
        - WeylElement.x(n, i) * transport(n)
        - WeylElement.xi(n, i) * xi_euler(n)
    )


def dx_block(n: int, indices: Sequence[int]) -> WeylElement:
    out = WeylElement.scalar(n, 1)
    for i in indices:
        out = out * WeylElement.dx(n, i)
    return out


def dxi_block(n: int, indices: Sequence[int]) -> WeylElement:
    out = WeylElement.scalar(n, 1)
    for i in indices:
        out = out * WeylElement.dxi(n, i)
    return out


def sym_average(indices: Sequence[int], build: Callable[[Sequence[int]], WeylElement], n: int) -> WeylElement:
    """Average build(permuted indices) over all permutations, weight 1/len!."""
    total = WeylElement.zero(n)
    perms = list(itertools.permutations(indices))
    for perm in perms:
        total = total + build(perm)
    return total.scale(Fraction(1, len(perms)))


# -- the verified identities ----------------------------------------------


def commutator_sides(n: int, k: int, l: int, jtuple: Sequence[int]) -> tuple[WeylElement, WeylElement]:
    """Both sides of the transport-past-xi-derivatives commutation rule.

    Left: transport^l followed by k xi-derivatives at jtuple (applied first).
    Right: symmetrization over jtuple of
        sum_p (-1)^p C(k,p) l!/(l-p)!  d_x^{first p} d_xi^{rest} transport^(l-p),
    the sum cut off where the transport power would go negative.
    """
    if len(jtuple) != k:
        raise ValueError(f"index tuple length {len(jtuple)} != k = {k}")
    T = transport(n)
    lhs = (T ** l) * dxi_block(n, jtuple)

    def build(perm: Sequence[int]) -> WeylElement:
        acc = WeylElement.zero(n)
        for p in range(0, min(k, l) + 1):
            coeff = Fraction((-1) ** p * math.comb(k, p) * _falling(l, p))
            piece = dx_block(n, perm[:p]) * dxi_block(n, perm[p:]) * (T ** (l - p))
            acc = acc + piece.scale(coeff)
        return acc

    rhs = sym_average(jtuple, build, n)
    return lhs, rhs


def verify_commutator_lemma(n: int, k: int, l: int, jtuple: Sequence[int]) -> bool:
    """Exact coefficient-table equality of the commutation rule."""
    lhs, rhs = commutator_sides(n, k, l, jtuple)
    return lhs == rhs


def corollary_sides(n: int, m: int, jtuple: Sequence[int]) -> tuple[WeylElement, WeylElement]:
    """Both sides of the symmetrized reduction identity of order m.

    Left: symmetrization over jtuple of
        sum_k 1/(m-k)! transport d_x^{first k} d_xi^{rest} transport^(m-k).
    Right: (1/m!) d_xi^{jtuple} transport^(m+1).
    """
    if len(jtuple) != m:
        raise ValueError(f"index tuple length {len(jtuple)} != m = {m}")
    T = transport(n)

    def build(perm: Sequence[int]) -> WeylElement:
        acc = WeylElement.zero(n)
        for k in range(m + 1):
            piece = T * dx_block(n, perm[:k]) * dxi_block(n, perm[k:]) * (T ** (m - k))
            acc = acc + piece.scale(Fraction(1, math.factorial(m - k)))
        return acc

    lhs = sym_average(jtuple, build, n)
    rhs = (dxi_block(n, jtuple) * (T ** (m + 1))).scale(Fraction(1, math.factorial(m)))
    return lhs, rhs


def verify_corollary(n: int, m: int) -> bool:
    """Exact equality of the symmetrized reduction identity, all sorted tuples."""
    for jtuple in itertools.combinations_with_replacement(range(1, n + 1), m):
        lhs, rhs = corollary_sides(n, m, jtuple)
        if lhs != rhs:
            return False
    return True


# -- polynomial action oracle ---------------------------------------------


def random_polynomial(n: int, degree: int, nterms: int, rng: random.Random) -> Polynomial:
    """Sparse random polynomial with rational coefficients, degree bounded."""
    poly: Polynomial = {}
    for _ in range(nterms):
        d = rng.randint(0, degree)
        A = [0] * n
        B = [0] * n
        for _ in range(d):
            which = rng.randrange(2 * n)
            (A if which < n else B)[which % n] += 1
        cf = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
        key = (tuple(A), tuple(B))
        poly[key] = poly.get(key, Fraction(0)) + cf
    return {k: v for k, v in poly.items() if v}


def agree_on_polynomials(lhs: WeylElement, rhs: WeylElement, polys: Iterable[Polynomial]) -> bool:
    """Exact agreement of two operators acting on each given polynomial."""
    return all(lhs.apply(p) == rhs.apply(p) for p in polys)
