#!/usr/bin/env python3
"""Benchmark the numba-compiled kernels against the pure-numpy fallback.

Runs each hot kernel on representative workloads and prints the per-call
times side by side.  The numpy column is what you get with
``SPARSE_GIVENS_NUMBA=0``; the compiled column is the default path.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from sparse_givens import _kernels
from sparse_givens._kernels import (
    _compose_rotations_numpy,
    _conjugate_pair_numpy,
    _insertion_coeffs_numpy,
    _fit_quad_mode_numpy,
    _precision_batch_numpy,
    _sparsity_zero_counts_numpy,
)


def timeit(fn, repeats):
    fn()  # warm-up (first call compiles on the numba path)
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def random_rotators(rng, q, z):
    m = q * (q - 1) // 2
    pairs = [(i, j) for i in range(q - 1) for j in range(i + 1, q)]
    chosen = sorted(rng.choice(m, size=z, replace=False))
    ii = np.array([pairs[t][0] for t in chosen], dtype=np.int64)
    jj = np.array([pairs[t][1] for t in chosen], dtype=np.int64)
    ws = rng.uniform(-1.5, 1.5, size=z)
    return ii, jj, ws


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()

    if not _kernels.NUMBA_ENABLED:
        print("numba path disabled (SPARSE_GIVENS_NUMBA=0); nothing to compare")
        return

    rng = np.random.default_rng(0)
    rows = []

    q = 30
    M = rng.standard_normal((q, q))
    M = M + M.T
    rows.append((
        "conjugate_pair (q=30)",
        timeit(lambda: _kernels.conjugate_pair(M, 3, 17, 0.8, 0.6), args.repeats * 20),
        timeit(lambda: _conjugate_pair_numpy(M, 3, 17, 0.8, 0.6), args.repeats * 20),
    ))

    ii, jj, ws = random_rotators(rng, q, 60)
    rows.append((
        "compose_rotations (q=30, z=60)",
        timeit(lambda: _kernels.compose_rotations(q, ii, jj, ws), args.repeats),
        timeit(lambda: _compose_rotations_numpy(q, ii, jj, ws), args.repeats),
    ))

    X = rng.standard_normal((150, q))
    S = X.T @ X
    a = rng.gamma(2.0, 1.0, size=q) + 0.1
    rows.append((
        "insertion_coeffs (q=30, z=60)",
        timeit(lambda: _kernels.insertion_coeffs(S, a, ii, jj, ws, 30, 30, 2, 9),
               args.repeats),
        timeit(lambda: _insertion_coeffs_numpy(S, a, ii, jj, ws, 30, 30, 2, 9),
               args.repeats),
    ))

    coeffs = rng.normal(scale=4.0, size=5)
    rows.append((
        "fit_quad_mode (129-point grid)",
        timeit(lambda: _kernels.fit_quad_mode(*coeffs, -1.57, 1.57, 129),
               args.repeats * 20),
        timeit(lambda: _fit_quad_mode_numpy(*coeffs, -1.57, 1.57, 129),
               args.repeats * 20),
    ))

    nsim, z = 200, 40
    q20 = 20
    ii2 = np.empty((nsim, z), dtype=np.int64)
    jj2 = np.empty((nsim, z), dtype=np.int64)
    for sim in range(nsim):
        a_, b_, _ = random_rotators(rng, q20, z)
        ii2[sim], jj2[sim] = a_, b_
    ws2 = rng.uniform(-1.5, 1.5, size=(nsim, z))
    eigs = rng.gamma(3.0, 1.0, size=(nsim, q20)) + 0.1
    rows.append((
        "sparsity_zero_counts (q=20, 200 sims)",
        timeit(lambda: _kernels.sparsity_zero_counts(q20, ii2, jj2, ws2, eigs, 1e-9), 5),
        timeit(lambda: _sparsity_zero_counts_numpy(q20, ii2, jj2, ws2, eigs, 1e-9), 5),
    ))

    ndraw = 200
    zs = np.full(ndraw, 10, dtype=np.int64)
    ii3, jj3, ws3 = [], [], []
    for _ in range(ndraw):
        a_, b_, w_ = random_rotators(rng, q20, 10)
        ii3.append(a_)
        jj3.append(b_)
        ws3.append(w_)
    ii3 = np.concatenate(ii3)
    jj3 = np.concatenate(jj3)
    ws3 = np.concatenate(ws3)
    a2d = rng.gamma(2.0, 1.0, size=(ndraw, q20)) + 0.1
    rows.append((
        "precision_batch (q=20, 200 draws)",
        timeit(lambda: _kernels.precision_batch(q20, zs, ii3, jj3, ws3, a2d), 5),
        timeit(lambda: _precision_batch_numpy(q20, zs, ii3, jj3, ws3, a2d), 5),
    ))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'numba':>12}  {'numpy':>12}  {'speedup':>8}")
    for name, t_nb, t_np in rows:
        print(f"{name:<{width}}  {t_nb * 1e6:>10.1f}us  {t_np * 1e6:>10.1f}us  "
              f"{t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
