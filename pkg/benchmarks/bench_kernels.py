"""Benchmark: compiled line-transform kernel versus the NumPy fallback.

Times the hot path (momentum-weighted line integrals of polynomial-
Gaussian term batches) across batch shapes that match real workloads:
plain transform evaluation, John-chain summand evaluation (many small
term sets), and wide point batches.  Also reports the max disagreement
between the two backends, which must be roundoff.

Run:  python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import time

import numpy as np

from raymoments.gaussfield import random_field
from raymoments.kernels import numpy_backend
from raymoments.quadrature import hermite_rule, rule_size

try:
    from raymoments import _linekernel

    COMPILED = _linekernel.line_transform_terms
except ImportError:
    COMPILED = None


def make_batch(n: int, terms: int, points: int, seed: int):
    rng = np.random.default_rng(seed)
    f = random_field(0, n, seed=seed, terms_per_component=terms)
    coeffs, powers, widths, centers = f.packed(())
    xs = 0.8 * rng.normal(size=(points, n))
    xis = rng.normal(size=(points, n))
    xis /= np.linalg.norm(xis, axis=1, keepdims=True)
    return coeffs, powers, widths, centers, xs, xis


def run(fn, batch, p: int, nodes, weights, repeats: int):
    coeffs, powers, widths, centers, xs, xis = batch
    out = None
    t0 = time.perf_counter()
    for _ in range(repeats):
        out = fn(coeffs, powers, widths, centers, p, xs, xis, nodes, weights)
    return (time.perf_counter() - t0) / repeats, out


def main() -> None:
    if COMPILED is None:
        print("compiled kernel not available; only the NumPy backend will run")
    cases = [
        ("transform batch      (T=12,  P=500, n=3)", 3, 12, 500, 2),
        ("chain summand batch  (T=40,  P=10,  n=3)", 3, 40, 10, 2),
        ("wide batch           (T=60,  P=2000,n=4)", 4, 60, 2000, 3),
    ]
    print(f"{'case':45s} {'numpy':>12s} {'compiled':>12s} {'speedup':>9s} {'max diff':>10s}")
    for label, n, terms, points, p in cases:
        batch = make_batch(n, terms, points, seed=17)
        deg = int(batch[1].sum(axis=1).max()) + p
        nodes, weights = hermite_rule(rule_size(deg))
        repeats = max(1, 2_000_00 // (terms * points))
        t_np, out_np = run(numpy_backend.line_transform_terms, batch, p, nodes, weights, repeats)
        if COMPILED is None:
            print(f"{label:45s} {t_np * 1e3:10.3f}ms {'-':>12s} {'-':>9s} {'-':>10s}")
            continue
        t_cy, out_cy = run(COMPILED, batch, p, nodes, weights, repeats)
        diff = float(np.max(np.abs(out_np - out_cy)))
        print(f"{label:45s} {t_np * 1e3:10.3f}ms {t_cy * 1e3:10.3f}ms {t_np / t_cy:8.2f}x {diff:10.2e}")


if __name__ == "__main__":
    main()
