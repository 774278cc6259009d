"""Momentum transforms against a dense-grid oracle, plus the summand calculus."""

from __future__ import annotations

import math

import numpy as np
import pytest

from raymoments.gaussfield import GaussTerm, GaussField, inner_derivative, random_field
from raymoments.xray import (
    TSPoint,
    TransformRep,
    momentum_transform,
    momentum_transform_batch,
    random_phase_points,
    random_ts_points,
    ray_transform_I,
)

from conftest import brute_line_integral


class TestTSPoint:
    def test_projects_near_manifold_input(self):
        p = TSPoint([0.3, -0.2, 3e-10], [0.0, 0.0, 1.0 + 2e-10])
        assert abs(np.linalg.norm(p.xi) - 1.0) < 1e-12
        assert abs(float(p.x @ p.xi)) < 1e-12

    def test_rejects_far_off_manifold_input(self):
        with pytest.raises(ValueError):
            TSPoint([0.0, 0.0, 0.5], [0.0, 0.0, 1.0])
        with pytest.raises(ValueError):
            TSPoint([1.0, 0.0, 0.0], [0.0, 0.0, 1.1])

    def test_arrays_are_read_only(self):
        p = TSPoint([0.5, 0.0, 0.0], [0.0, 1.0, 0.0])
        with pytest.raises(ValueError):
            p.x[0] = 2.0
        with pytest.raises(ValueError):
            p.xi[0] = 2.0

    def test_random_points_lie_on_manifold(self, rng):
        for p in random_ts_points(4, 20, rng):
            assert abs(np.linalg.norm(p.xi) - 1.0) < 1e-12
            assert abs(float(p.x @ p.xi)) < 1e-12


class TestMomentumTransform:
    @pytest.mark.parametrize("p", [0, 1, 2, 3])
    def test_scalar_field_matches_grid_oracle(self, p):
        f = random_field(0, 3, seed=41)
        x = np.array([0.2, -0.3, 0.4])
        xi = np.array([0.6, 0.8, 0.0])
        exact = momentum_transform(p, f, x, xi)
        brute = brute_line_integral(f, p, x, xi)
        assert exact == pytest.approx(brute, rel=1e-10, abs=1e-12)

    @pytest.mark.parametrize("m", [1, 2])
    def test_tensor_field_matches_grid_oracle(self, m):
        f = random_field(m, 3, seed=42 + m)
        x = np.array([-0.1, 0.25, 0.3])
        xi = np.array([0.48, -0.6, 0.64])
        for p in (0, 1, 2):
            exact = momentum_transform(p, f, x, xi)
            brute = brute_line_integral(f, p, x, xi)
            assert exact == pytest.approx(brute, rel=1e-10, abs=1e-12)

    def test_known_gaussian_integral(self):
        # unit Gaussian along a unit line through its center: integral e^{-t^2} dt
        f = GaussField.from_terms(0, 3, {(): [GaussTerm(1.0, (0, 0, 0), 1.0, (0.0, 0.0, 0.0))]})
        val = momentum_transform(0, f, [0.0, 0.0, 0.0], [1.0, 0.0, 0.0])
        assert val == pytest.approx(math.sqrt(math.pi), rel=1e-14)

    def test_direction_scaling_changes_parameterization(self):
        # J^p(x, c xi) = c^{q-p}/|c| J^p(x, xi) for rank-q fields, c > 0 here
        f = random_field(2, 3, seed=44)
        x = np.array([0.15, 0.2, -0.1])
        xi = np.array([0.3, -0.5, 0.8])
        for p in (0, 1, 2):
            for c in (0.5, 2.0, 3.0):
                lhs = momentum_transform(p, f, x, c * xi)
                rhs = c ** (2 - p) / abs(c) * momentum_transform(p, f, x, xi)
                assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_oversampling_is_a_no_op(self):
        f = random_field(1, 4, seed=45)
        rng = np.random.default_rng(0)
        xs, xis = random_phase_points(4, 10, rng)
        base = momentum_transform_batch(1, f, xs, xis)
        refined = momentum_transform_batch(1, f, xs, xis, oversample=8)
        assert np.max(np.abs(base - refined)) < 1e-13 * max(1.0, np.max(np.abs(base)))

    def test_zero_direction_rejected(self):
        f = random_field(0, 3, seed=46)
        with pytest.raises(ValueError):
            momentum_transform(0, f, [0.0, 0.0, 0.0], [0.0, 0.0, 0.0])

    def test_negative_order_rejected(self):
        f = random_field(0, 3, seed=46)
        with pytest.raises(ValueError):
            momentum_transform(-1, f, [0.0, 0.0, 0.0], [1.0, 0.0, 0.0])

    def test_ray_transform_on_manifold(self, rng):
        f = random_field(1, 3, seed=47)
        for pt in random_ts_points(3, 5, rng):
            assert ray_transform_I(1, f, pt) == pytest.approx(
                momentum_transform(1, f, pt.x, pt.xi), rel=1e-15
            )

    def test_evenness_on_manifold(self, rng):
        # reversing the direction flips the sign by (-1)^(m-k)
        for m in (0, 1, 2):
            f = random_field(m, 3, seed=48 + m)
            for k in range(m + 1):
                for pt in random_ts_points(3, 4, rng):
                    fwd = ray_transform_I(k, f, pt)
                    bwd = momentum_transform(k, f, pt.x, -pt.xi)
                    assert bwd == pytest.approx((-1.0) ** (m - k) * fwd, rel=1e-12, abs=1e-13)


class TestTransformRep:
    def test_momentum_rep_evaluates_like_transform(self):
        f = random_field(2, 3, seed=51)
        rep = TransformRep.momentum(1, f)
        rng = np.random.default_rng(1)
        xs, xis = random_phase_points(3, 6, rng)
        vals, scales = rep.evaluate_batch(xs, xis)
        direct = momentum_transform_batch(1, f, xs, xis)
        assert np.max(np.abs(vals - direct)) == 0.0
        assert np.all(scales >= np.abs(vals))

    def test_dx_matches_finite_difference(self):
        f = random_field(1, 3, seed=52)
        rep = TransformRep.momentum(0, f).dx(2)
        x = np.array([0.1, -0.2, 0.3])
        xi = np.array([0.5, 0.6, -0.4])
        h = 1e-5
        xp, xm = x.copy(), x.copy()
        xp[1] += h
        xm[1] -= h
        fd = (momentum_transform(0, f, xp, xi) - momentum_transform(0, f, xm, xi)) / (2 * h)
        assert rep.evaluate(x, xi) == pytest.approx(fd, rel=1e-8, abs=1e-9)

    def test_dxi_matches_finite_difference(self):
        f = random_field(2, 3, seed=53)
        rep = TransformRep.momentum(1, f).dxi(3)
        x = np.array([0.2, 0.1, -0.3])
        xi = np.array([0.4, -0.7, 0.9])
        h = 1e-5
        xip, xim = xi.copy(), xi.copy()
        xip[2] += h
        xim[2] -= h
        fd = (momentum_transform(1, f, x, xip) - momentum_transform(1, f, x, xim)) / (2 * h)
        assert rep.evaluate(x, xi) == pytest.approx(fd, rel=1e-8, abs=1e-9)

    def test_mixed_partials_commute(self):
        f = random_field(1, 3, seed=54)
        rep = TransformRep.momentum(1, f)
        a = rep.dx(1).dxi(2)
        b = rep.dxi(2).dx(1)
        x = np.array([0.3, -0.1, 0.2])
        xi = np.array([0.5, 0.5, -0.5])
        assert a.evaluate(x, xi) == pytest.approx(b.evaluate(x, xi), rel=1e-13)

    def test_dxi_order_commutes(self):
        f = random_field(2, 3, seed=55)
        rep = TransformRep.momentum(0, f)
        a = rep.dxi(1).dxi(3)
        b = rep.dxi(3).dxi(1)
        x = np.array([-0.2, 0.3, 0.1])
        xi = np.array([0.8, -0.2, 0.4])
        assert a.evaluate(x, xi) == pytest.approx(b.evaluate(x, xi), rel=1e-13)

    def test_transport_is_directional_x_derivative(self):
        f = random_field(1, 3, seed=56)
        rep = TransformRep.momentum(2, f).transport()
        x = np.array([0.1, 0.4, -0.2])
        xi = np.array([0.3, 0.9, -0.1])
        h = 1e-5
        fd = (
            momentum_transform(2, f, x + h * xi, xi) - momentum_transform(2, f, x - h * xi, xi)
        ) / (2 * h)
        assert rep.evaluate(x, xi) == pytest.approx(fd, rel=1e-8, abs=1e-9)

    def test_shift_along_the_line(self):
        # J^k at base point x + t xi expands through lower momenta at x
        f = random_field(1, 3, seed=57)
        x = np.array([0.2, -0.3, 0.1])
        xi = np.array([0.6, 0.0, 0.8])
        k = 2
        for t in (-1.5, -0.4, 0.7, 2.0):
            lhs = momentum_transform(k, f, x + t * xi, xi)
            rhs = sum(
                math.comb(k, l) * (-t) ** (k - l) * momentum_transform(l, f, x, xi)
                for l in range(k + 1)
            )
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-13)

    def test_summands_never_merge(self):
        f = random_field(1, 3, seed=58)
        rep = TransformRep.momentum(0, f)
        diff = rep - rep
        assert len(diff) == 2
        x = np.array([0.1, 0.2, 0.3])
        xi = np.array([1.0, -1.0, 0.5])
        vals, scales = diff.evaluate_batch(x[None, :], xi[None, :])
        assert abs(vals[0]) < 1e-15 * scales[0] + 1e-300
        assert scales[0] > 0

    def test_compact_preserves_values(self):
        f = random_field(1, 3, seed=59)
        rep = TransformRep.momentum(1, f).dxi(2).dx(1)
        packed = rep.compact()
        assert len(packed) <= len(rep)
        rng = np.random.default_rng(2)
        xs, xis = random_phase_points(3, 5, rng)
        a, _ = rep.evaluate_batch(xs, xis)
        b, _ = packed.evaluate_batch(xs, xis)
        assert np.max(np.abs(a - b)) < 1e-13 * max(1.0, np.max(np.abs(a)))

    def test_inner_derivative_transform_identity(self, rng):
        # I^k(dv) = -k I^{k-1} v on the line manifold
        v = random_field(1, 3, seed=60)
        dv = inner_derivative(v)
        for pt in random_ts_points(3, 6, rng):
            for k in (1, 2):
                lhs = ray_transform_I(k, dv, pt)
                rhs = -k * ray_transform_I(k - 1, v, pt)
                assert lhs == pytest.approx(rhs, rel=1e-11, abs=1e-12)
