"""Rank reduction: two constructions, defining properties, derivative recovery."""

from __future__ import annotations

import numpy as np
import pytest

from raymoments.gaussfield import random_field
from raymoments.reduction import (
    check_recovery,
    check_reduction_properties,
    component_recovery_residual,
    recovery_targets,
    reduce_via_transport,
    reduce_via_tuple,
    reduction_equivalence,
    symmetry_residual,
    transport_reduced_extension,
)
from raymoments.symtensor import sorted_indices
from raymoments.xray import TransformRep, random_phase_points


@pytest.fixture(scope="module")
def points():
    return random_phase_points(3, 6, np.random.default_rng(19))


@pytest.fixture(scope="module")
def field_m2():
    return random_field(2, 3, seed=91)


@pytest.fixture(scope="module")
def reps_m2(field_m2):
    return [TransformRep.momentum(k, field_m2) for k in range(3)]


def test_exact_backend_required():
    f = random_field(1, 3, seed=92)
    good = TransformRep.momentum(1, f)
    with pytest.raises(TypeError, match="exact backend"):
        reduce_via_transport(lambda x, xi: 0j, (1,))
    with pytest.raises(TypeError, match="exact backend"):
        reduce_via_tuple([good, lambda x, xi: 0j], (1,))


def test_tuple_reduction_needs_full_ladder(reps_m2):
    with pytest.raises(ValueError):
        reduce_via_tuple(reps_m2[:2], (1, 2))


def test_equivalence_of_constructions(reps_m2, points):
    xs, xis = points
    for target in sorted_indices(2, 3):
        res, via_top, via_tuple = reduction_equivalence(reps_m2, target, xs, xis)
        assert res < 1e-10
        assert len(via_top) > 0 and len(via_tuple) > 0


def test_rank_zero_reduction_is_identity(points):
    f = random_field(0, 3, seed=93)
    rep = TransformRep.momentum(0, f)
    reduced = reduce_via_transport(rep, ())
    xs, xis = points
    a, _ = reduced.evaluate_batch(xs, xis)
    b, _ = rep.evaluate_batch(xs, xis)
    assert np.max(np.abs(a - b)) < 1e-14 * max(1.0, float(np.max(np.abs(b))))


def test_defining_properties(reps_m2, points):
    xs, xis = points
    for target in ((1, 1), (1, 2), (2, 3)):
        reduced = reduce_via_transport(reps_m2[-1], target)
        report = check_reduction_properties(reduced, xs, xis)
        assert report.homogeneity < 1e-9
        assert report.transport < 1e-9
        assert all(v < 1e-9 for v in report.john.values())
        assert report.max_residual() < 1e-9


def test_symmetry_over_target_orderings(reps_m2, points):
    xs, xis = points
    assert symmetry_residual(reps_m2[-1], (2, 1), xs, xis) < 1e-10
    assert symmetry_residual(reps_m2[-1], (3, 1), xs, xis) < 1e-10


def test_component_recovery(field_m2, points):
    xs, xis = points
    for target in sorted_indices(2, 3):
        assert component_recovery_residual(field_m2, target, xs, xis) < 1e-9


def test_component_recovery_rank1(points):
    f = random_field(1, 3, seed=94)
    xs, xis = points
    for target in sorted_indices(1, 3):
        assert component_recovery_residual(f, target, xs, xis) < 1e-10


def test_transport_rebuild_matches_extensions(field_m2, reps_m2, points):
    # the order-p extension rebuilt from the top by transport powers
    # agrees with the direct order-p transform
    xs, xis = points
    for p in range(3):
        rebuilt = transport_reduced_extension(reps_m2[-1], 2, p)
        a, sa = rebuilt.evaluate_batch(xs, xis)
        b, _ = reps_m2[p].evaluate_batch(xs, xis)
        denom = np.maximum(1.0, np.maximum(np.abs(b), sa))
        assert float(np.max(np.abs(a - b) / denom)) < 1e-11
    with pytest.raises(ValueError):
        transport_reduced_extension(reps_m2[-1], 2, 3)


def test_recovery_identity(field_m2, points):
    xs, xis = points
    for k in range(3):
        for gamma in recovery_targets(2, 3, k):
            report = check_recovery(field_m2, k, gamma, xs, xis)
            assert report.coefficients_vanish
            assert report.full_sum < 1e-9
            assert report.collapsed < 1e-9


def test_recovery_argument_validation(field_m2, points):
    xs, xis = points
    with pytest.raises(ValueError):
        check_recovery(field_m2, 3, (1, 1, 1), xs, xis)
    with pytest.raises(ValueError):
        check_recovery(field_m2, 1, (1, 2), xs, xis)
