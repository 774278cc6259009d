"""Symmetric tensor storage, contraction, and the exact rational coefficients."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from raymoments.symtensor import (
    SymTensor,
    canonical,
    coefficient_a,
    coefficient_c,
    contract_direction,
    dimension,
    multiplicity,
    sorted_indices,
    symmetrize,
)


def test_dimension_matches_enumeration():
    for m in range(5):
        for n in range(1, 5):
            assert dimension(m, n) == len(list(sorted_indices(m, n)))


def test_dimension_known_values():
    assert dimension(0, 3) == 1
    assert dimension(1, 3) == 3
    assert dimension(2, 3) == 6
    assert dimension(3, 2) == 4


def test_dimension_rejects_bad_arguments():
    with pytest.raises(ValueError):
        dimension(-1, 3)
    with pytest.raises(ValueError):
        dimension(2, 0)


def test_canonical_sorts_and_validates():
    assert canonical((3, 1, 2), 3) == (1, 2, 3)
    with pytest.raises(ValueError):
        canonical((0, 1), 3)
    with pytest.raises(ValueError):
        canonical((1, 4), 3)


@given(st.lists(st.integers(min_value=1, max_value=4), min_size=0, max_size=6))
def test_multiplicity_counts_distinct_permutations(idx):
    # oracle: literally enumerate the distinct orderings
    assert multiplicity(idx) == len(set(itertools.permutations(idx)))


def test_tensor_lookup_ignores_index_order():
    f = SymTensor(3, 3, {(1, 2, 3): 5.0, (1, 1, 2): 2 - 1j})
    assert f.value((3, 1, 2)) == 5.0
    assert f[(2, 1, 1)] == 2 - 1j
    assert f[(3, 3, 3)] == 0


def test_tensor_storage_is_dense_over_sorted_indices():
    f = SymTensor(2, 3)
    assert len(f) == dimension(2, 3)
    assert all(val == 0 for _, val in f.items())


def test_tensor_rejects_wrong_rank_index():
    with pytest.raises(ValueError):
        SymTensor(2, 3, {(1, 2, 3): 1.0})


def test_symmetrize_frozen_examples():
    # single off-order entry averages against the missing orderings
    s2 = symmetrize({(2, 1): 2.0}, 2, 3)
    assert s2[(1, 2)] == 1.0
    s3 = symmetrize({(1, 2, 3): 6.0}, 3, 3)
    assert s3[(1, 2, 3)] == 1.0
    assert s3[(1, 1, 2)] == 0.0


@given(
    st.integers(min_value=1, max_value=3),
    st.integers(min_value=1, max_value=3),
    st.integers(min_value=0, max_value=2**32 - 1),
)
@settings(max_examples=50)
def test_symmetrize_fixed_point_on_symmetric_input(m, n, seed):
    import random

    r = random.Random(seed)
    raw = {}
    for idx in sorted_indices(m, n):
        val = complex(r.uniform(-1, 1), r.uniform(-1, 1))
        for perm in set(itertools.permutations(idx)):
            raw[perm] = val
    s = symmetrize(raw, m, n)
    for idx in sorted_indices(m, n):
        assert s[idx] == pytest.approx(raw[idx], abs=1e-15)


def test_contract_direction_equals_full_index_sum():
    f = SymTensor(2, 3, {(1, 1): 1.0, (1, 2): -2.0, (2, 3): 0.5j, (3, 3): 4.0})
    xi = (0.3, -1.1, 0.7)
    brute = 0j
    for idx in itertools.product(range(1, 4), repeat=2):
        brute += f.value(idx) * xi[idx[0] - 1] * xi[idx[1] - 1]
    assert contract_direction(f, xi) == pytest.approx(brute, rel=1e-14)


def test_contract_direction_rank_zero_is_the_scalar():
    f = SymTensor(0, 3, {(): 2.5})
    assert contract_direction(f, (1.0, 0.0, 0.0)) == 2.5


def test_contract_direction_checks_length():
    f = SymTensor(1, 3, {(1,): 1.0})
    with pytest.raises(ValueError):
        contract_direction(f, (1.0, 0.0))


def test_coefficient_c_frozen_values():
    # hand-expanded alternating sums
    assert coefficient_c(2, 1, 1) == Fraction(-1)
    assert coefficient_c(2, 2, 2) == Fraction(1)
    assert coefficient_c(3, 1, 2) == Fraction(-2)
    assert coefficient_c(4, 2, 3) == Fraction(2)


def test_coefficient_c_k_zero_is_binomial():
    for m in range(5):
        for p in range(m + 2):
            assert coefficient_c(m, 0, p) == math.comb(m, p)


def test_coefficient_c_collapse():
    for m in range(7):
        for k in range(1, m + 1):
            for p in range(k):
                assert coefficient_c(m, k, p) == 0
            assert coefficient_c(m, k, k) == (-1) ** k


def test_coefficient_a_is_kronecker_delta():
    for m in range(7):
        for k in range(m + 1):
            for p in range(k + 1):
                expected = Fraction(1) if p == k else Fraction(0)
                assert coefficient_a(m, k, p) == expected


def test_coefficient_a_relates_to_c():
    # a(m,k,p) = (-1)^k C(k,p) c(m,k,p), both sides exact rationals
    for m in range(6):
        for k in range(m + 1):
            for p in range(k + 1):
                rel = (-1) ** k * math.comb(k, p) * coefficient_c(m, k, p)
                assert coefficient_a(m, k, p) == rel


def test_coefficient_argument_validation():
    with pytest.raises(ValueError):
        coefficient_c(2, 3, 0)
    with pytest.raises(ValueError):
        coefficient_a(2, 1, 2)
    with pytest.raises(ValueError):
        coefficient_a(3, 4, 1)
