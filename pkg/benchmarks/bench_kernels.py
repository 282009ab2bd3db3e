#!/usr/bin/env python3
"""Benchmark the jitted kernels against the pure-numpy fallback.

Times the two hot kernels (rule coverage over an instance pool and
nearest-neighbor mixed-type distances) at search-realistic shapes, checks
both backends return identical results, then times one full search run
per backend.

Usage: python benchmarks/bench_kernels.py [--pool 20000] [--rules 150]
"""
import argparse
import time

import numpy as np

import activerules as ar
from activerules import kernels
from activerules.kernels import numba_backend, numpy_backend
from activerules.rules import CompiledRules


def build_case(n_pool, n_rules, seed=0):
    rng = np.random.default_rng(seed)
    space = ar.load_schema("""{
      "attributes": [
        {"name": "a", "type": "continuous", "min": 0, "max": 1},
        {"name": "b", "type": "continuous", "min": -5, "max": 5},
        {"name": "c", "type": "categorical", "values": ["u", "v", "w", "x"]},
        {"name": "d", "type": "continuous", "min": 0, "max": 100},
        {"name": "e", "type": "categorical", "values": ["p", "q", "r"]}
      ]
    }""")
    rules = []
    while len(rules) < n_rules:
        n_conds = rng.integers(1, 4)
        attrs = rng.choice(space.m, size=n_conds, replace=False)
        conds = []
        for j in sorted(int(v) for v in attrs):
            attr = space.attributes[j]
            if attr.is_continuous:
                lo = rng.uniform(attr.lo, attr.hi)
                hi = rng.uniform(lo, attr.hi)
                conds.append(ar.interval_condition(j, lo, hi))
            else:
                k = rng.integers(1, len(attr.values) + 1)
                picked = rng.choice(len(attr.values), size=k, replace=False)
                conds.append(
                    ar.value_condition(j, [attr.values[int(i)] for i in picked])
                )
        rule = ar.Rule(conds)
        if rule not in rules:
            rules.append(rule)
    X = np.empty((n_pool, space.m))
    for j, attr in enumerate(space.attributes):
        if attr.is_continuous:
            X[:, j] = rng.uniform(attr.lo, attr.hi, n_pool)
        else:
            X[:, j] = rng.integers(0, len(attr.values), n_pool)
    return space, CompiledRules(space, rules), X


def timed(fn, repeats=5):
    best = float("inf")
    out = None
    for _ in range(repeats):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def bench_kernels(n_pool, n_rules):
    space, compiled, X = build_case(n_pool, n_rules)
    candidates = X[:64]
    existing = X[: n_pool // 2]

    print(f"== cover_matrix: {n_rules} rules x {n_pool} instances ==")
    # warm up the JIT before timing
    numba_backend.cover_matrix(X[:8], space.kinds, compiled.lo, compiled.hi,
                               compiled.mask)
    t_np, out_np = timed(lambda: numpy_backend.cover_matrix(
        X, space.kinds, compiled.lo, compiled.hi, compiled.mask))
    t_nb, out_nb = timed(lambda: numba_backend.cover_matrix(
        X, space.kinds, compiled.lo, compiled.hi, compiled.mask))
    print(f"numpy: {t_np * 1e3:8.2f} ms")
    print(f"numba: {t_nb * 1e3:8.2f} ms   speedup {t_np / t_nb:5.1f}x   "
          f"results match: {np.array_equal(out_np, out_nb)}")

    print(f"== min_gower_distances: 64 candidates x {existing.shape[0]} rows ==")
    numba_backend.min_gower_distances(candidates[:4], existing[:16],
                                      space.kinds, space.ranges)
    t_np, out_np = timed(lambda: numpy_backend.min_gower_distances(
        candidates, existing, space.kinds, space.ranges))
    t_nb, out_nb = timed(lambda: numba_backend.min_gower_distances(
        candidates, existing, space.kinds, space.ranges))
    print(f"numpy: {t_np * 1e3:8.2f} ms")
    print(f"numba: {t_nb * 1e3:8.2f} ms   speedup {t_np / t_nb:5.1f}x   "
          f"results match: {np.array_equal(out_np, out_nb)}")

    # the search's hottest pattern: one-row coverage on every pool append
    print(f"== cover_matrix, single-row x 2000 calls ({n_rules} rules) ==")
    row = X[:1]

    def many(backend):
        def run():
            for _ in range(2000):
                backend.cover_matrix(row, space.kinds, compiled.lo,
                                     compiled.hi, compiled.mask)
        return run

    t_np, _ = timed(many(numpy_backend), repeats=3)
    t_nb, _ = timed(many(numba_backend), repeats=3)
    print(f"numpy: {t_np * 1e3:8.2f} ms")
    print(f"numba: {t_nb * 1e3:8.2f} ms   speedup {t_np / t_nb:5.1f}x")


def bench_search():
    print("== full search run (two-box fixture, 60 iterations) ==")
    space = ar.load_schema("""{
      "attributes": [
        {"name": "x", "type": "continuous", "min": 0, "max": 1},
        {"name": "y", "type": "continuous", "min": 0, "max": 1}
      ]
    }""")
    truth = ar.DecisionSet([
        ar.Rule([ar.interval_condition(0, 0.0, 0.45),
                 ar.interval_condition(1, 0.0, 0.45)]),
        ar.Rule([ar.interval_condition(0, 0.55, 1.0),
                 ar.interval_condition(1, 0.55, 1.0)]),
    ])
    rng = np.random.default_rng(3)
    rows = rng.uniform(0, 1, (200, 2))
    cfg = ar.SearchConfig(
        params=ar.ObjectiveParams(lam=0.01, beta=0.02), max_iters=60, seed=11
    )
    results = {}
    for name in ("numpy", "numba"):
        kernels.set_backend(name)
        oracle = ar.make_boxes_oracle(truth, space)
        start = time.perf_counter()
        res = ar.run_search(cfg, rows, oracle, space)
        elapsed = time.perf_counter() - start
        results[name] = (elapsed, res.best, res.state.synthetic_count)
        print(f"{name}: {elapsed:6.2f} s   rules={len(res.best)}   "
              f"synthetic={res.state.synthetic_count}")
    same = results["numpy"][1:] == results["numba"][1:]
    print(f"search results identical across backends: {same}")
    speedup = results["numpy"][0] / results["numba"][0]
    print(f"search speedup: {speedup:.1f}x")


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--pool", type=int, default=20000)
    parser.add_argument("--rules", type=int, default=150)
    args = parser.parse_args()
    print(f"numba available: {kernels.NUMBA_AVAILABLE}")
    bench_kernels(args.pool, args.rules)
    bench_search()
