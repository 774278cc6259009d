"""Symmetric tensor fields with polynomial-times-Gaussian components.

Each component is a finite sum of terms

    coeff * prod_i (x_i - c_i)^power_i * exp(-width * |x - c|^2)

with width > 0.  The family is closed under differentiation and under
every operation the transforms need, so line integrals reduce to exact
Gauss-Hermite quadrature.  Fields are treated as immutable; every
operation returns a new field.
"""

from __future__ import annotations

import json
import math
from typing import Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from .symtensor import Index, SymTensor, canonical, sorted_indices

TermKey = tuple[tuple[int, ...], float, tuple[float, ...]]


class GaussTerm(NamedTuple):
    """One polynomial-Gaussian summand of a component."""

    coeff: complex
    power: tuple[int, ...]
    width: float
    center: tuple[float, ...]

    def evaluate(self, x: Sequence[float]) -> complex:
        w = np.asarray(x, dtype=float) - np.asarray(self.center)
        mono = 1.0
        for wi, pi in zip(w, self.power):
            mono *= wi**pi
        return self.coeff * mono * math.exp(-self.width * float(w @ w))


def _term_key(power: Sequence[int], width: float, center: Sequence[float]) -> TermKey:
    return (tuple(int(p) for p in power), float(width), tuple(float(c) for c in center))


class GaussField:
    """Rank-m symmetric tensor field on R^n with Gaussian-term components.

    Internally each component maps (power, width, center) keys to complex
    coefficients; equal keys are merged and exact-zero coefficients dropped
    after every operation.
    """

    __slots__ = ("m", "n", "_comp", "_packed")

    def __init__(self, m: int, n: int, components: Mapping[Index, Mapping[TermKey, complex]] | None = None):
        if m < 0 or n < 1:
            raise ValueError(f"bad rank/dimension m={m}, n={n}")
        self.m = m
        self.n = n
        comp: dict[Index, dict[TermKey, complex]] = {idx: {} for idx in sorted_indices(m, n)}
        if components:
            for idx, terms in components.items():
                key = canonical(idx, n)
                if len(key) != m:
                    raise ValueError(f"index {idx} has length {len(key)}, expected rank {m}")
                bucket = comp[key]
                for tk, cf in terms.items():
                    if len(tk[0]) != n or len(tk[2]) != n:
                        raise ValueError(f"term key {tk} does not match dimension {n}")
                    if tk[1] <= 0:
                        raise ValueError(f"width must be positive, got {tk[1]}")
                    val = bucket.get(tk, 0j) + complex(cf)
                    if val == 0:
                        bucket.pop(tk, None)
                    else:
                        bucket[tk] = val
        self._comp = comp
        self._packed: dict[Index, tuple] = {}

    # -- construction ------------------------------------------------------

    @classmethod
    def zero(cls, m: int, n: int) -> "GaussField":
        return cls(m, n)

    @classmethod
    def from_terms(cls, m: int, n: int, terms: Mapping[Index, Sequence[GaussTerm]]) -> "GaussField":
        comp: dict[Index, dict[TermKey, complex]] = {}
        for idx, tlist in terms.items():
            bucket = comp.setdefault(canonical(idx, n), {})
            for t in tlist:
                tk = _term_key(t.power, t.width, t.center)
                bucket[tk] = bucket.get(tk, 0j) + complex(t.coeff)
        return cls(m, n, comp)

    # -- access ------------------------------------------------------------

    def terms(self, index: Index) -> list[GaussTerm]:
        key = canonical(index, self.n)
        return [GaussTerm(cf, tk[0], tk[1], tk[2]) for tk, cf in self._comp[key].items()]

    def component_items(self) -> Iterator[tuple[Index, dict[TermKey, complex]]]:
        return iter(self._comp.items())

    def term_count(self) -> int:
        return sum(len(b) for b in self._comp.values())

    def packed(self, index: Index):
        """Component terms as (coeffs, powers, widths, centers) arrays, cached."""
        key = canonical(index, self.n)
        hit = self._packed.get(key)
        if hit is None:
            bucket = self._comp[key]
            T = len(bucket)
            coeffs = np.zeros(T, dtype=complex)
            powers = np.zeros((T, self.n), dtype=np.int64)
            widths = np.zeros(T, dtype=float)
            centers = np.zeros((T, self.n), dtype=float)
            for t, (tk, cf) in enumerate(bucket.items()):
                coeffs[t] = cf
                powers[t] = tk[0]
                widths[t] = tk[1]
                centers[t] = tk[2]
            hit = (coeffs, powers, widths, centers)
            self._packed[key] = hit
        return hit

    # -- algebra -----------------------------------------------------------

    def scale(self, s: complex) -> "GaussField":
        if s == 0:
            return GaussField(self.m, self.n)
        return GaussField(self.m, self.n, {
            idx: {tk: s * cf for tk, cf in bucket.items()}
            for idx, bucket in self._comp.items()
        })

    def __add__(self, other: "GaussField") -> "GaussField":
        if (self.m, self.n) != (other.m, other.n):
            raise ValueError("rank/dimension mismatch")
        out: dict[Index, dict[TermKey, complex]] = {}
        for idx, bucket in self._comp.items():
            merged = dict(bucket)
            for tk, cf in other._comp[idx].items():
                merged[tk] = merged.get(tk, 0j) + cf
            out[idx] = merged
        return GaussField(self.m, self.n, out)

    def __sub__(self, other: "GaussField") -> "GaussField":
        return self + other.scale(-1)

    def __neg__(self) -> "GaussField":
        return self.scale(-1)

    # -- analysis ----------------------------------------------------------

    def evaluate(self, x: Sequence[float]) -> SymTensor:
        """Pointwise value as a symmetric tensor."""
        xs = np.asarray(x, dtype=float)
        comp = {}
        for idx, bucket in self._comp.items():
            total = 0j
            for tk, cf in bucket.items():
                total += GaussTerm(cf, *tk).evaluate(xs)
            comp[idx] = total
        return SymTensor(self.m, self.n, comp)

    def partial_derivative(self, i: int) -> "GaussField":
        """Componentwise d/dx^i (i in 1..n); exact within the term family."""
        if not 1 <= i <= self.n:
            raise ValueError(f"direction {i} outside 1..{self.n}")
        ax = i - 1
        out: dict[Index, dict[TermKey, complex]] = {idx: {} for idx in self._comp}
        for idx, bucket in self._comp.items():
            res = out[idx]

            def add(tk: TermKey, cf: complex):
                val = res.get(tk, 0j) + cf
                if val == 0:
                    res.pop(tk, None)
                else:
                    res[tk] = val

            for (power, width, center), cf in bucket.items():
                if power[ax] > 0:
                    lowered = power[:ax] + (power[ax] - 1,) + power[ax + 1:]
                    add((lowered, width, center), cf * power[ax])
                raised = power[:ax] + (power[ax] + 1,) + power[ax + 1:]
                add((raised, width, center), -2.0 * width * cf)
        return GaussField(self.m, self.n, out)

    def partial_contract(self, j: int) -> "GaussField":
        """Fix the first index slot to j: output component (i_2..i_m) = input (j, i_2..i_m)."""
        if self.m < 1:
            raise ValueError("cannot contract a rank-0 field")
        if not 1 <= j <= self.n:
            raise ValueError(f"slot index {j} outside 1..{self.n}")
        out = {}
        for idx in sorted_indices(self.m - 1, self.n):
            out[idx] = dict(self._comp[canonical((j,) + idx, self.n)])
        return GaussField(self.m - 1, self.n, out)

    def component_field(self, index: Index) -> "GaussField":
        """One component as a rank-0 field."""
        key = canonical(index, self.n)
        return GaussField(0, self.n, {(): dict(self._comp[key])})

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        comps = []
        for idx, bucket in self._comp.items():
            terms = [
                {
                    "coeff": [cf.real, cf.imag],
                    "power": list(tk[0]),
                    "width": tk[1],
                    "center": list(tk[2]),
                }
                for tk, cf in bucket.items()
            ]
            comps.append({"index": list(idx), "terms": terms})
        return {"m": self.m, "n": self.n, "components": comps}

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "GaussField":
        try:
            m = int(data["m"])
            n = int(data["n"])
            comp: dict[Index, dict[TermKey, complex]] = {}
            for entry in data["components"]:
                idx = tuple(int(i) for i in entry["index"])
                bucket = comp.setdefault(canonical(idx, n), {})
                for t in entry["terms"]:
                    re, im = t["coeff"]
                    tk = _term_key(t["power"], t["width"], t["center"])
                    bucket[tk] = bucket.get(tk, 0j) + complex(float(re), float(im))
            return cls(m, n, comp)
        except (KeyError, TypeError, IndexError) as exc:
            raise ValueError(f"malformed field spec: {exc!r}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "GaussField":
        return cls.from_json_dict(json.loads(text))


def inner_derivative(v: GaussField) -> GaussField:
    """Symmetrized gradient: lifts a rank-(m-1) field to rank m.

    Component at a sorted tuple I is the average over slots s of
    d(v at I minus slot s)/dx^{I_s}.
    """
    m = v.m + 1
    derivs = [v.partial_derivative(i) for i in range(1, v.n + 1)]
    comp: dict[Index, dict[TermKey, complex]] = {}
    for idx in sorted_indices(m, v.n):
        bucket: dict[TermKey, complex] = {}
        for s in range(m):
            rest = idx[:s] + idx[s + 1:]
            for tk, cf in derivs[idx[s] - 1]._comp[canonical(rest, v.n)].items():
                bucket[tk] = bucket.get(tk, 0j) + cf / m
        comp[idx] = bucket
    return GaussField(m, v.n, comp)


def random_field(m: int, n: int, seed: int, terms_per_component: int = 3) -> GaussField:
    """Deterministic random field: |power| <= 3, width in [0.5, 2], |center| <= 1,
    coefficients in the unit disc."""
    rng = np.random.default_rng(seed)
    comp: dict[Index, dict[TermKey, complex]] = {}
    for idx in sorted_indices(m, n):
        bucket: dict[TermKey, complex] = {}
        for _ in range(terms_per_component):
            total_deg = int(rng.integers(0, 4))
            power = [0] * n
            for _ in range(total_deg):
                power[int(rng.integers(0, n))] += 1
            width = float(rng.uniform(0.5, 2.0))
            direction = rng.normal(size=n)
            direction /= np.linalg.norm(direction)
            center = rng.uniform(0.0, 1.0) ** (1.0 / n) * direction
            r = math.sqrt(rng.uniform(0.0, 1.0))
            phase = rng.uniform(0.0, 2.0 * math.pi)
            coeff = r * complex(math.cos(phase), math.sin(phase))
            tk = _term_key(power, width, center)
            bucket[tk] = bucket.get(tk, 0j) + coeff
        comp[idx] = bucket
    return GaussField(m, n, comp)
