"""Pure-numpy implementations of the hot kernels.

Arithmetic is ordered identically to the jitted backend (per-attribute
accumulation in schema order) so both paths return the same floats.
"""
from __future__ import annotations

import numpy as np


def cover_matrix(X, kinds, lo, hi, mask):
    """Boolean coverage of R encoded rules over n encoded instances.

    X: (n, m) float64 rows; kinds: (m,) uint8 (0 continuous, 1 categorical);
    lo, hi: (R, m) interval bounds, open attributes carry -inf/+inf;
    mask: (R, m, K) categorical membership, open attributes all-True.
    Returns (R, n) bool.
    """
    R = lo.shape[0]
    n, m = X.shape
    out = np.empty((R, n), dtype=np.bool_)
    for r in range(R):
        ok = np.ones(n, dtype=np.bool_)
        for j in range(m):
            col = X[:, j]
            if kinds[j] == 0:
                ok &= (col >= lo[r, j]) & (col <= hi[r, j])
            else:
                ok &= mask[r, j][col.astype(np.int64)]
        out[r] = ok
    return out


def min_gower_distances(C, E, kinds, ranges):
    """Per candidate, the smallest mean mixed-type distance to any row of E.

    C: (k, m) candidates; E: (N, m) existing rows; ranges: (m,) spans for
    continuous attributes. Returns (k,) float64; +inf where E is empty.
    """
    k, m = C.shape
    out = np.empty(k, dtype=np.float64)
    if E.shape[0] == 0:
        out.fill(np.inf)
        return out
    for a in range(k):
        acc = np.zeros(E.shape[0], dtype=np.float64)
        for j in range(m):
            if kinds[j] == 0:
                acc = acc + np.abs(C[a, j] - E[:, j]) / ranges[j]
            else:
                acc = acc + (E[:, j] != C[a, j]).astype(np.float64)
        out[a] = (acc / m).min()
    return out
