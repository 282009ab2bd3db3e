"""Numba-jitted implementations of the hot kernels.

Same contracts as numpy_backend; loop bodies apply the identical
floating-point operations in the identical order.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def cover_matrix(X, kinds, lo, hi, mask):
    R = lo.shape[0]
    n = X.shape[0]
    m = X.shape[1]
    out = np.empty((R, n), dtype=np.bool_)
    for r in range(R):
        for i in range(n):
            ok = True
            for j in range(m):
                v = X[i, j]
                if kinds[j] == 0:
                    if v < lo[r, j] or v > hi[r, j]:
                        ok = False
                        break
                else:
                    if not mask[r, j, int(v)]:
                        ok = False
                        break
            out[r, i] = ok
    return out


@njit(cache=True)
def min_gower_distances(C, E, kinds, ranges):
    # Tracks the smallest un-divided attribute sum and divides once at the
    # end; per-attribute contributions are non-negative, so a partial sum
    # reaching the current best can be abandoned without changing the
    # result (division by m is monotone, so min commutes with it).
    k = C.shape[0]
    N = E.shape[0]
    m = C.shape[1]
    out = np.empty(k, dtype=np.float64)
    for a in range(k):
        best_acc = np.inf
        for b in range(N):
            acc = 0.0
            for j in range(m):
                if kinds[j] == 0:
                    acc += abs(C[a, j] - E[b, j]) / ranges[j]
                else:
                    if C[a, j] != E[b, j]:
                        acc += 1.0
                if acc >= best_acc:
                    break
            if acc < best_acc:
                best_acc = acc
        out[a] = best_acc / m
    return out
