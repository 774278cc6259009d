"""Planar moment conditions for momentum ray transforms of 2D tensor fields.

In two dimensions the range is pinned down by moment conditions rather
than differential ones: weighted integrals of the k-th transform over
all lines of a fixed direction are homogeneous polynomials in the
direction (encoded as a unit complex number zeta), and their
coefficients are fixed combinations of complex-basis moments of the
field components.  This module computes both sides exactly: the moment
integrals by separated two-axis Gauss-Hermite quadrature, the predicted
polynomials from closed-form moment tables, plus the cross-pair
consistency relations and the downward recursion that extracts a
potential field from two data sets with equal order-0 transforms.

Conventions: a direction zeta = xi_1 + i xi_2 on the unit circle; lines
are parametrized as p * perp(xi) + t * xi with perp(xi) = (-xi_2, xi_1),
which matches the complex picture where the line's base point is
i p zeta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .gaussfield import GaussField
from .quadrature import hermite_rule, rule_size
from .xray import TSPoint, momentum_transform

ComplexMoments = Mapping[tuple[int, int, int], complex]


def perp(xi: np.ndarray) -> np.ndarray:
    """The positively oriented normal (-xi_2, xi_1)."""
    return np.array([-xi[1], xi[0]])


def zeta_to_direction(zeta: complex) -> np.ndarray:
    """Unit complex number to the direction vector it encodes."""
    if abs(abs(zeta) - 1.0) > 1e-9:
        raise ValueError(f"|zeta| = {abs(zeta)} is not 1")
    return np.array([zeta.real, zeta.imag])


def _check_conventions() -> None:
    # the complex base point i p zeta must be the real point p * perp(xi)
    zeta = complex(math.cos(0.3), math.sin(0.3))
    p = 0.7
    xi = zeta_to_direction(zeta)
    z = 1j * p * zeta
    assert np.allclose(p * perp(xi), [z.real, z.imag], atol=1e-15)


_check_conventions()


# -- basis change ---------------------------------------------------------


def expansion_matrix(m: int) -> np.ndarray:
    """Row j expands (dz)^(m-j) (conj dz)^j over the real monomial basis
    dx_1^(m-q) dx_2^q, q = 0..m."""
    A = np.zeros((m + 1, m + 1), dtype=complex)
    for j in range(m + 1):
        for a in range(m - j + 1):
            for b in range(j + 1):
                A[j, a + b] += (
                    math.comb(m - j, a) * math.comb(j, b) * (1j) ** a * (-1j) ** b
                )
    return A


@dataclass
class BasisChange:
    """Real-to-complex component change for rank-m planar tensors."""

    m: int
    A: np.ndarray
    B: np.ndarray

    @classmethod
    def of_rank(cls, m: int) -> "BasisChange":
        A = expansion_matrix(m)
        B = np.linalg.inv(A)
        if not np.allclose(A @ B, np.eye(m + 1), atol=1e-13):
            raise ValueError(f"basis inversion failed for rank {m}")
        return cls(m=m, A=A, B=B)


def real_components(f: GaussField) -> list[GaussField]:
    """Binomially weighted scalar components: entry q is C(m,q) times the
    component with q second-axis indices, so that the full contraction
    with xi^m is sum_q entry_q xi_1^(m-q) xi_2^q."""
    if f.n != 2:
        raise ValueError(f"planar machinery needs n = 2, got n = {f.n}")
    out = []
    for q in range(f.m + 1):
        idx = (1,) * (f.m - q) + (2,) * q
        out.append(f.component_field(idx).scale(math.comb(f.m, q)))
    return out


def real_to_complex(f: GaussField) -> list[GaussField]:
    """Complex-basis scalar components: entry j satisfies
    sum_j entry_j zeta^(m-j) conj(zeta)^j = full contraction with xi^m."""
    checks = real_components(f)
    B = BasisChange.of_rank(f.m).B
    out = []
    for j in range(f.m + 1):
        acc = GaussField.zero(0, 2)
        for q in range(f.m + 1):
            acc = acc + checks[q].scale(complex(B[q, j]))
        out.append(acc)
    return out


# -- moments of the components --------------------------------------------


def _term_plane_moment(coeff: complex, power: tuple[int, ...], width: float,
                       center: tuple[float, ...], alpha: int, beta: int) -> complex:
    """Exact integral of z^alpha conj(z)^beta (x-c)^power exp(-width |x-c|^2)."""
    deg = alpha + beta + power[0] + power[1]
    nodes, weights = hermite_rule(rule_size(deg))
    sa = math.sqrt(width)
    zc = complex(center[0], center[1])
    s1 = nodes[:, None]
    s2 = nodes[None, :]
    z = zc + (s1 + 1j * s2) / sa
    vals = z**alpha * np.conj(z) ** beta
    if power[0]:
        vals = vals * (s1 / sa) ** power[0]
    if power[1]:
        vals = vals * (s2 / sa) ** power[1]
    return coeff / width * complex(weights @ vals @ weights)


def field_plane_moment(field: GaussField, alpha: int, beta: int) -> complex:
    """Exact integral of z^alpha conj(z)^beta times a scalar field."""
    if field.m != 0 or field.n != 2:
        raise ValueError("plane moments are defined for scalar planar fields")
    total = 0j
    for (power, width, center), cf in field._comp[()].items():
        total += _term_plane_moment(cf, power, width, center, alpha, beta)
    return total


class MomentTable:
    """Lazy cache of complex-basis moments of a rank-m field."""

    def __init__(self, f: GaussField):
        self.m = f.m
        self.components = real_to_complex(f)
        self._cache: dict[tuple[int, int, int], complex] = {}

    def get(self, j: int, alpha: int, beta: int) -> complex:
        key = (j, alpha, beta)
        hit = self._cache.get(key)
        if hit is None:
            hit = field_plane_moment(self.components[j], alpha, beta)
            self._cache[key] = hit
        return hit


def complex_momenta(f: GaussField, alpha: int, beta: int) -> np.ndarray:
    """Row of complex-basis moments over the component index j."""
    return np.array([field_plane_moment(c, alpha, beta) for c in real_to_complex(f)])


# -- moment integrals of transform data ------------------------------------


@dataclass
class PlanarData:
    """Momentum transform data of planar rank-m tensor data, exact backend.

    ``summands[k]`` is a list of (coeff, order, field): the k-th data
    function is sum_i coeff_i * (order_i momentum transform of field_i).
    Derived data (like the downward recursion output) mix orders, which
    is why the order rides along per summand.
    """

    m: int
    summands: list[list[tuple[complex, int, GaussField]]]

    @classmethod
    def from_field(cls, f: GaussField) -> "PlanarData":
        if f.n != 2:
            raise ValueError(f"planar data needs n = 2, got n = {f.n}")
        return cls(m=f.m, summands=[[(1.0 + 0j, k, f)] for k in range(f.m + 1)])

    def evaluator(self, k: int) -> Callable[[np.ndarray, np.ndarray], complex]:
        parts = self.summands[k]

        def phi(x: np.ndarray, xi: np.ndarray) -> complex:
            return sum(c * momentum_transform(p, g, x, xi) for c, p, g in parts)

        return phi


def _term_ray_moment(power: tuple[int, ...], width: float, center: tuple[float, ...],
                     k: int, r: int, xi: np.ndarray) -> complex:
    """Exact double integral of p^r t^k (x-c)^power exp(-width |x-c|^2) over
    the line family x = t xi + p perp(xi)."""
    pxi = perp(xi)
    tstar = center[0] * xi[0] + center[1] * xi[1]
    pstar = center[0] * pxi[0] + center[1] * pxi[1]
    sa = math.sqrt(width)
    deg = max(k, r) + power[0] + power[1]
    nodes, weights = hermite_rule(rule_size(deg))
    st = nodes[:, None]
    sp = nodes[None, :]
    vals = np.ones_like(st * sp)
    if k:
        vals = vals * (tstar + st / sa) ** k
    if r:
        vals = vals * (pstar + sp / sa) ** r
    for ax in range(2):
        if power[ax]:
            vals = vals * ((st * xi[ax] + sp * pxi[ax]) / sa) ** power[ax]
    return complex(weights @ vals @ weights) / width


def field_ray_moment(f: GaussField, k: int, r: int, zeta: complex) -> complex:
    """Exact p-weighted moment of the order-k transform of a rank-m field
    in the direction encoded by zeta."""
    xi = zeta_to_direction(zeta)
    checks = real_components(f)
    total = 0j
    for q, comp in enumerate(checks):
        mono = xi[0] ** (f.m - q) * xi[1] ** q
        if mono == 0.0:
            continue
        sub = 0j
        for (power, width, center), cf in comp._comp[()].items():
            sub += cf * _term_ray_moment(power, width, center, k, r, xi)
        total += mono * sub
    return total


def moment_integral(data: PlanarData, k: int, r: int, zeta: complex) -> complex:
    """p^r-weighted integral of the k-th data function over the lines with
    direction zeta, computed exactly from the summand representation."""
    if not 0 <= k <= data.m:
        raise ValueError(f"order {k} outside 0..{data.m}")
    total = 0j
    for coeff, p, g in data.summands[k]:
        total += coeff * field_ray_moment(g, p, r, zeta)
    return total


# -- homogeneous polynomial structure ---------------------------------------


def predicted_polynomial(table: MomentTable, r: int, k: int) -> np.ndarray:
    """Coefficients (over s = 0..d, d = r+k+m) of the degree-d homogeneous
    polynomial zeta^(d-s) conj(zeta)^s that the (r, k) moment integral
    must equal; built from the complex moment table."""
    m = table.m
    d = r + k + m
    coeffs = np.zeros(d + 1, dtype=complex)
    front = (1j) ** r / 2 ** (r + k)
    for j in range(m + 1):
        for alpha in range(r + 1):
            for beta in range(k + 1):
                s = j + alpha + beta
                coeffs[s] += (
                    front
                    * (-1) ** alpha
                    * math.comb(r, alpha)
                    * math.comb(k, beta)
                    * table.get(j, alpha + beta, r + k - alpha - beta)
                )
    return coeffs


def circle_samples(degree: int) -> np.ndarray:
    """Equispaced unit directions, twice-oversampled for a degree-d fit."""
    T = 4 * degree + 8
    theta = 2.0 * np.pi * np.arange(T) / T
    return np.exp(1j * theta)


def fit_homogeneous(zetas: np.ndarray, values: np.ndarray, degree: int) -> tuple[np.ndarray, float]:
    """Least-squares fit of samples on the circle by a degree-d homogeneous
    polynomial in (zeta, conj zeta); returns (coefficients over s, max
    absolute fit residual).  Raises if the sample set cannot resolve all
    d + 1 coefficients."""
    zetas = np.asarray(zetas, dtype=complex)
    values = np.asarray(values, dtype=complex)
    M = np.stack([zetas ** (degree - s) * np.conj(zetas) ** s for s in range(degree + 1)], axis=1)
    coeffs, _, rank, _ = np.linalg.lstsq(M, values, rcond=None)
    if rank < degree + 1:
        raise ValueError(
            f"rank-deficient sample set: {len(zetas)} samples resolve only "
            f"{rank} of {degree + 1} coefficients"
        )
    resid = float(np.max(np.abs(M @ coeffs - values)))
    return coeffs, resid


@dataclass
class MomentFitReport:
    """Fit-versus-prediction comparison for one (r, k) moment integral."""

    r: int
    k: int
    degree: int
    fitted: np.ndarray
    predicted: np.ndarray
    fit_residual: float
    coeff_residual: float


def moment_fit_report(data: PlanarData, table: MomentTable, r: int, k: int) -> MomentFitReport:
    """Sample the (r, k) moment integral over directions, fit the homogeneous
    polynomial, and compare with the moment-table prediction."""
    d = r + k + data.m
    zetas = circle_samples(d)
    values = np.array([moment_integral(data, k, r, z) for z in zetas])
    fitted, fit_res = fit_homogeneous(zetas, values, d)
    predicted = predicted_polynomial(table, r, k)
    return MomentFitReport(
        r=r,
        k=k,
        degree=d,
        fitted=fitted,
        predicted=predicted,
        fit_residual=fit_res,
        coeff_residual=float(np.max(np.abs(fitted - predicted))),
    )


# -- consistency across two data sets ---------------------------------------


def consistency_check(mu: MomentTable, nu: MomentTable, r_max: int) -> dict[tuple[int, int], float]:
    """Cross-pair relations binding two moment tables whose order-0
    transforms agree: for each r and each s = 0..r+m the alternating
    binomial combination of moment differences must vanish.  Returns the
    relative residual per (r, s)."""
    if mu.m != nu.m:
        raise ValueError("moment tables have different ranks")
    m = mu.m
    out: dict[tuple[int, int], float] = {}
    for r in range(r_max + 1):
        for s in range(r + m + 1):
            total = 0j
            scale = 1.0
            for j in range(max(0, s - r), min(s, m) + 1):
                c = (-1) ** j * math.comb(r, s - j)
                if c == 0:
                    continue
                a = mu.get(j, s - j, r + j - s)
                b = nu.get(j, s - j, r + j - s)
                total += c * (a - b)
                scale = max(scale, abs(c * a), abs(c * b))
            out[(r, s)] = abs(total) / scale
    return out


# -- downward recursion ------------------------------------------------------


@dataclass
class ChiReport:
    """Diagnostics of the downward recursion between two data sets."""

    order0_residual: float
    chi: PlanarData


def chi_recursion(data: PlanarData, g: GaussField, points: Sequence[TSPoint]) -> ChiReport:
    """Build the candidate lower-rank data chi^k = -(phi^(k+1) - (k+1)-th
    transform of g) / (k+1), k = 0..m-1.

    Requires the order-0 transforms of the data and of g to agree; the
    residual of that precondition at the sample points is reported, and
    the recursion is produced either way.
    """
    if g.n != 2 or g.m != data.m:
        raise ValueError("comparison field must be planar of the same rank")
    phi0 = data.evaluator(0)
    worst = 0.0
    for pt in points:
        a = phi0(pt.x, pt.xi)
        b = momentum_transform(0, g, pt.x, pt.xi)
        worst = max(worst, abs(a - b) / max(1.0, abs(a)))
    chi_summands = []
    for k in range(data.m):
        parts = [(-c / (k + 1), p, fld) for c, p, fld in data.summands[k + 1]]
        parts.append((1.0 / (k + 1) + 0j, k + 1, g))
        chi_summands.append(parts)
    return ChiReport(order0_residual=worst, chi=PlanarData(m=data.m - 1, summands=chi_summands))
