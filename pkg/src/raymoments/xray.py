"""Momentum ray transforms of Gaussian tensor fields.

The basic object is the weighted line integral

    (momentum transform of order p) (x, xi) =
        integral t^p < f(x + t xi), xi^q > dt

for a rank-q field f, defined for every x and every nonzero xi.  On unit
directions with x orthogonal to xi this restricts to the transform the
inversion theory works with; ``TSPoint`` models that manifold.

``TransformRep`` is a closed calculus for such integrals: a finite sum of
summands ``coeff * xi^prefactor * (transform of order p, rank q, of some
field)``.  Partial derivatives in x and xi push down to new summands of
the same shape, so arbitrary mixed derivatives of transform data can be
evaluated with exact quadrature and no finite differencing.  Summands
are deliberately never merged across operator applications: identities
that should vanish then cancel numerically at evaluation time, which
keeps residual checks meaningful.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import kernels
from .gaussfield import GaussField
from .quadrature import hermite_rule, rule_size
from .symtensor import multiplicity, sorted_indices

TS_TOLERANCE = 1e-12
TS_PROJECT_LIMIT = 1e-9


class TSPoint:
    """A unit direction xi with a base point x orthogonal to it.

    Inputs within ``TS_PROJECT_LIMIT`` of the manifold are re-projected
    (x := x - <x, xi> xi after normalizing xi); anything farther off is
    rejected.  Stored points satisfy the constraints to ``TS_TOLERANCE``.
    """

    __slots__ = ("x", "xi")

    def __init__(self, x: Sequence[float], xi: Sequence[float]):
        xv = np.asarray(x, dtype=float).copy()
        xiv = np.asarray(xi, dtype=float).copy()
        if xv.shape != xiv.shape or xv.ndim != 1:
            raise ValueError("x and xi must be vectors of equal length")
        norm = float(np.linalg.norm(xiv))
        if abs(norm - 1.0) > TS_PROJECT_LIMIT:
            raise ValueError(f"|xi| = {norm} deviates from 1 beyond {TS_PROJECT_LIMIT}")
        xiv /= norm
        dot = float(xv @ xiv)
        if abs(dot) > TS_PROJECT_LIMIT:
            raise ValueError(f"<x, xi> = {dot} deviates from 0 beyond {TS_PROJECT_LIMIT}")
        xv = xv - dot * xiv
        dot = float(xv @ xiv)
        if abs(dot) > TS_TOLERANCE or abs(float(np.linalg.norm(xiv)) - 1.0) > TS_TOLERANCE:
            raise ValueError("projection failed to reach tolerance")
        xv.setflags(write=False)
        xiv.setflags(write=False)
        self.x = xv
        self.xi = xiv

    @property
    def n(self) -> int:
        return self.x.shape[0]

    def __repr__(self) -> str:
        return f"TSPoint(x={self.x.tolist()}, xi={self.xi.tolist()})"


def random_ts_points(n: int, count: int, rng: np.random.Generator) -> list[TSPoint]:
    """Random points on the line manifold: uniform unit xi, Gaussian x projected."""
    points = []
    for _ in range(count):
        xi = rng.normal(size=n)
        xi /= np.linalg.norm(xi)
        x = 0.8 * rng.normal(size=n)
        points.append(TSPoint(x - (x @ xi) * xi, xi))
    return points


def random_phase_points(
    n: int, count: int, rng: np.random.Generator, xi_norm: tuple[float, float] = (0.5, 2.0)
) -> tuple[np.ndarray, np.ndarray]:
    """Random off-manifold (x, xi) samples with |xi| bounded away from zero."""
    xs = 0.8 * rng.normal(size=(count, n))
    dirs = rng.normal(size=(count, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    norms = rng.uniform(xi_norm[0], xi_norm[1], size=(count, 1))
    return xs, dirs * norms


def _as_points(x, xi) -> tuple[np.ndarray, np.ndarray, bool]:
    xs = np.asarray(x, dtype=float)
    xis = np.asarray(xi, dtype=float)
    single = xs.ndim == 1
    if single:
        xs = xs[None, :]
        xis = xis[None, :]
    if np.any(np.einsum("pi,pi->p", xis, xis) == 0.0):
        raise ValueError("direction xi must be nonzero")
    return xs, xis, single


def _component_degree(powers: np.ndarray, p: int) -> int:
    return int(powers.sum(axis=1).max()) + p if powers.size else p


def momentum_transform_batch(p: int, field: GaussField, xs: np.ndarray, xis: np.ndarray,
                             oversample: int = 0) -> np.ndarray:
    """Order-p momentum transform of a rank-q field at a batch of (x, xi) rows."""
    if p < 0:
        raise ValueError(f"momentum order must be nonnegative, got {p}")
    values = np.zeros(xs.shape[0], dtype=complex)
    for idx in sorted_indices(field.m, field.n):
        coeffs, powers, widths, centers = field.packed(idx)
        if coeffs.shape[0] == 0:
            continue
        nodes, weights = hermite_rule(rule_size(_component_degree(powers, p)) + oversample)
        comp = kernels.line_transform_terms(
            coeffs, powers, widths, centers, p, xs, xis, nodes, weights
        )
        if field.m:
            mono = np.ones(xs.shape[0])
            for i in idx:
                mono = mono * xis[:, i - 1]
            comp = comp * mono
        values += multiplicity(idx) * comp
    return values


def momentum_transform(p: int, field: GaussField, x, xi, oversample: int = 0) -> complex:
    """Order-p momentum transform at a single phase point (x, xi nonzero)."""
    xs, xis, _ = _as_points(x, xi)
    return complex(momentum_transform_batch(p, field, xs, xis, oversample)[0])


def ray_transform_I(k: int, field: GaussField, point: TSPoint) -> complex:
    """k-th momentum ray transform on the line manifold."""
    if point.n != field.n:
        raise ValueError("point dimension does not match field")
    if not 0 <= k:
        raise ValueError(f"momentum index must be nonnegative, got {k}")
    return momentum_transform(k, field, point.x, point.xi)


class Summand(NamedTuple):
    """coeff * xi^xi_pow * (order-p momentum transform of a rank-q field)."""

    coeff: complex
    p: int
    q: int
    xi_pow: tuple[int, ...]
    field: GaussField


class TransformRep:
    """Finite sum of momentum-transform summands, closed under d/dx and d/dxi."""

    __slots__ = ("n", "summands")

    def __init__(self, n: int, summands: Iterable[Summand]):
        self.n = n
        self.summands = tuple(s for s in summands if s.coeff != 0)

    @classmethod
    def momentum(cls, p: int, field: GaussField) -> "TransformRep":
        """The order-p transform of a field as a one-summand representation."""
        if p < 0:
            raise ValueError(f"momentum order must be nonnegative, got {p}")
        return cls(field.n, [Summand(1.0 + 0j, p, field.m, (0,) * field.n, field)])

    def __add__(self, other: "TransformRep") -> "TransformRep":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        return TransformRep(self.n, self.summands + other.summands)

    def __sub__(self, other: "TransformRep") -> "TransformRep":
        return self + other.scale(-1)

    def scale(self, c: complex) -> "TransformRep":
        return TransformRep(self.n, [s._replace(coeff=s.coeff * c) for s in self.summands])

    def __len__(self) -> int:
        return len(self.summands)

    def dx(self, i: int) -> "TransformRep":
        """Partial derivative in x^i: passes straight onto each field."""
        if not 1 <= i <= self.n:
            raise ValueError(f"direction {i} outside 1..{self.n}")
        return TransformRep(self.n, [
            s._replace(field=s.field.partial_derivative(i)) for s in self.summands
        ])

    def dxi(self, j: int) -> "TransformRep":
        """Partial derivative in xi^j.

        Product rule over the xi-prefactor, plus the two transform pushdowns:
        the momentum order rises by one on the differentiated field, and one
        contraction slot drops onto the rank-(q-1) partial contraction.
        """
        if not 1 <= j <= self.n:
            raise ValueError(f"direction {j} outside 1..{self.n}")
        ax = j - 1
        out: list[Summand] = []
        for s in self.summands:
            if s.xi_pow[ax] > 0:
                lowered = s.xi_pow[:ax] + (s.xi_pow[ax] - 1,) + s.xi_pow[ax + 1:]
                out.append(Summand(s.coeff * s.xi_pow[ax], s.p, s.q, lowered, s.field))
            out.append(Summand(s.coeff, s.p + 1, s.q, s.xi_pow, s.field.partial_derivative(j)))
            if s.q > 0:
                out.append(Summand(s.coeff * s.q, s.p, s.q - 1, s.xi_pow, s.field.partial_contract(j)))
        return TransformRep(self.n, out)

    def derive(self, x_dirs: Sequence[int] = (), xi_dirs: Sequence[int] = ()) -> "TransformRep":
        """Mixed partial derivative: all x directions, then all xi directions."""
        rep = self
        for i in x_dirs:
            rep = rep.dx(i)
        for j in xi_dirs:
            rep = rep.dxi(j)
        return rep

    def transport(self) -> "TransformRep":
        """Apply sum_j xi_j d/dx^j, expanded summand by summand."""
        out: list[Summand] = []
        for s in self.summands:
            for j in range(1, self.n + 1):
                raised = s.xi_pow[:j - 1] + (s.xi_pow[j - 1] + 1,) + s.xi_pow[j:]
                out.append(Summand(s.coeff, s.p, s.q, raised, s.field.partial_derivative(j)))
        return TransformRep(self.n, out)

    def transport_power(self, l: int) -> "TransformRep":
        rep = self
        for _ in range(l):
            rep = rep.transport()
        return rep

    def evaluate_batch(self, xs: np.ndarray, xis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Values and cancellation scales at a batch of phase points.

        The scale at a point is the sum of the absolute values of the
        individual summand contributions; |value| / max(1, scale) is the
        natural relative residual for identities that should vanish.
        """
        values = np.zeros(xs.shape[0], dtype=complex)
        scales = np.zeros(xs.shape[0], dtype=float)
        for s in self.summands:
            contrib = momentum_transform_batch(s.p, s.field, xs, xis)
            if any(s.xi_pow):
                mono = np.ones(xs.shape[0])
                for ax, e in enumerate(s.xi_pow):
                    if e:
                        mono = mono * xis[:, ax] ** e
                contrib = contrib * mono
            contrib = contrib * s.coeff
            values += contrib
            scales += np.abs(contrib)
        return values, scales

    def evaluate(self, x, xi) -> complex:
        xs, xis, _ = _as_points(x, xi)
        return complex(self.evaluate_batch(xs, xis)[0][0])

    def compact(self) -> "TransformRep":
        """Merge summands sharing (p, q, prefactor) by adding their fields.

        Opt-in only: residual checks rely on unmerged summands so that
        algebraic cancellations happen in floating point at evaluation.
        """
        groups: dict[tuple[int, int, tuple[int, ...]], list[Summand]] = {}
        for s in self.summands:
            groups.setdefault((s.p, s.q, s.xi_pow), []).append(s)
        out = []
        for (p, q, xi_pow), members in groups.items():
            field = members[0].field.scale(members[0].coeff)
            for s in members[1:]:
                field = field + s.field.scale(s.coeff)
            out.append(Summand(1.0 + 0j, p, q, xi_pow, field))
        return TransformRep(self.n, out)
