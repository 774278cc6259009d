"""Symmetric tensors over R^n stored once per sorted multi-index.

A rank-m symmetric tensor has one independent component per sorted
index tuple (i_1 <= ... <= i_m), each i in 1..n.  Lookups accept any
permutation of an index tuple.  The combinatorial coefficients used by
the rank-reduction and recovery identities live here as well; they are
computed in exact rational arithmetic.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

Index = tuple[int, ...]


def dimension(m: int, n: int) -> int:
    """Number of independent components of a rank-m symmetric tensor on R^n."""
    if m < 0:
        raise ValueError(f"rank must be nonnegative, got {m}")
    if n < 1:
        raise ValueError(f"dimension must be positive, got {n}")
    return math.comb(n + m - 1, m)


def sorted_indices(m: int, n: int) -> Iterator[Index]:
    """All sorted index tuples of length m with entries in 1..n, lexicographic."""
    return itertools.combinations_with_replacement(range(1, n + 1), m)


def canonical(index: Iterable[int], n: int | None = None) -> Index:
    """Sort an index tuple; validate entries when n is given."""
    idx = tuple(sorted(index))
    if n is not None:
        for i in idx:
            if not 1 <= i <= n:
                raise ValueError(f"index entry {i} outside 1..{n}")
    return idx


def multiplicity(index: Iterable[int]) -> int:
    """Number of distinct permutations of an index tuple (multinomial count)."""
    idx = tuple(index)
    count = math.factorial(len(idx))
    for i in set(idx):
        count //= math.factorial(idx.count(i))
    return count


class SymTensor:
    """Rank-m symmetric tensor with complex components.

    Components are stored for every sorted index tuple (zero-valued ones
    included), so the storage count always equals ``dimension(m, n)``.
    """

    __slots__ = ("m", "n", "_comp")

    def __init__(self, m: int, n: int, components: Mapping[Index, complex] | None = None):
        self.m = m
        self.n = n
        comp = {idx: 0j for idx in sorted_indices(m, n)}
        if components:
            for idx, val in components.items():
                key = canonical(idx, n)
                if len(key) != m:
                    raise ValueError(f"index {idx} has length {len(key)}, expected {m}")
                comp[key] = complex(val)
        self._comp = comp

    def value(self, index: Iterable[int]) -> complex:
        """Component at an index tuple, in any order."""
        return self._comp[canonical(index, self.n)]

    def __getitem__(self, index: Iterable[int]) -> complex:
        return self.value(index)

    def items(self) -> Iterator[tuple[Index, complex]]:
        return iter(self._comp.items())

    def __len__(self) -> int:
        return len(self._comp)

    def __repr__(self) -> str:
        return f"SymTensor(m={self.m}, n={self.n}, {self._comp!r})"


def symmetrize(raw: Mapping[Index, complex], m: int, n: int) -> SymTensor:
    """Average a raw (not necessarily symmetric) component map over index permutations.

    The symmetrized component at (i_1 .. i_m) is the mean of the raw values
    over all m! orderings; missing raw entries count as zero.
    """
    fact = math.factorial(m)
    comp = {}
    for idx in sorted_indices(m, n):
        total = 0j
        for perm in itertools.permutations(idx):
            total += complex(raw.get(perm, 0))
        comp[idx] = total / fact
    return SymTensor(m, n, comp)


def contract_direction(f: SymTensor, xi) -> complex:
    """Full contraction of a symmetric tensor with the m-fold power of a vector.

    Sums multiplicity(index) * component * prod(xi_i) over sorted indices,
    which equals the sum over all m^... unsorted index tuples.
    """
    if len(xi) != f.n:
        raise ValueError(f"direction has length {len(xi)}, expected {f.n}")
    total = 0j
    for idx, val in f.items():
        if val == 0:
            continue
        mono = 1.0
        for i in idx:
            mono *= xi[i - 1]
        total += multiplicity(idx) * val * mono
    return total


def coefficient_c(m: int, k: int, p: int) -> Fraction:
    """Alternating binomial sum sum_r (-1)^r C(k,r) C(r+m-k, p).

    Collapses to 0 for p < k <= m and to (-1)^k for p = k <= m; k = 0
    returns C(m, p).
    """
    if not (0 <= k <= m):
        raise ValueError(f"need 0 <= k <= m, got k={k}, m={m}")
    if p < 0:
        raise ValueError(f"need p >= 0, got {p}")
    total = 0
    for r in range(k + 1):
        total += (-1) ** r * math.comb(k, r) * math.comb(r + m - k, p)
    return Fraction(total)


def coefficient_a(m: int, k: int, p: int) -> Fraction:
    """Recovery-identity coefficient, as an exact rational.

    Defined by the alternating factorial sum
    ((-1)^m / m!) C(k,p) sum_{l=max(m-k,p)}^{m} (-1)^l (k! l! / (k+l-m)!) C(m,l) C(l,p);
    it vanishes for p < k <= m and equals 1 for p = k <= m.
    """
    if not (0 <= p <= k <= m):
        raise ValueError(f"need 0 <= p <= k <= m, got p={p}, k={k}, m={m}")
    total = Fraction(0)
    for l in range(max(m - k, p), m + 1):
        total += (
            Fraction((-1) ** l * math.factorial(k) * math.factorial(l), math.factorial(k + l - m))
            * math.comb(m, l)
            * math.comb(l, p)
        )
    return Fraction((-1) ** m, math.factorial(m)) * math.comb(k, p) * total
