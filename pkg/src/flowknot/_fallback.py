"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``.

Both modules expose the same functions with the same return types; ``_core``
picks one at import time.
"""
from __future__ import annotations

import numpy as np


def perm_rank(perm) -> int:
    """Position of ``perm`` in the lexicographic list of permutations."""
    n = len(perm)
    rank = 0
    fact = 1
    for k in range(2, n + 1):
        fact *= k
    for i in range(n):
        fact //= n - i
        smaller = 0
        for j in range(i + 1, n):
            if perm[j] < perm[i]:
                smaller += 1
        rank += smaller * fact
    return rank


def gf2_rank(mat: np.ndarray) -> int:
    """Rank over GF(2) of a 0/1 ``uint8`` matrix."""
    rows = []
    for row in np.asarray(mat, dtype=np.uint8):
        v = 0
        for j in np.flatnonzero(row & 1):
            v |= 1 << int(j)
        if v:
            rows.append(v)
    rank = 0
    pivots: dict = {}
    for v in rows:
        while v:
            top = v.bit_length() - 1
            p = pivots.get(top)
            if p is None:
                pivots[top] = v
                rank += 1
                break
            v ^= p
    return rank


def empty_rectangles(perms: np.ndarray, O: np.ndarray, X: np.ndarray, avoid_markings: bool) -> np.ndarray:
    """Empty rectangles out of every state.

    Returns an ``(k, 6)`` int64 array with columns
    ``src, dst, col_start, width, row_start, height``; ``src``/``dst`` are
    lexicographic state indices.
    """
    perms = np.asarray(perms, dtype=np.int64)
    N, n = perms.shape
    O = [int(v) for v in O]
    X = [int(v) for v in X]
    out = []
    for s in range(N):
        x = [int(v) for v in perms[s]]
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                w = (j - i) % n
                h = (x[j] - x[i]) % n
                blocked = False
                for k in range(n):
                    if 0 < (k - i) % n < w and 0 < (x[k] - x[i]) % n < h:
                        blocked = True
                        break
                if not blocked and avoid_markings:
                    for c in range(n):
                        if (c - i) % n < w and ((O[c] - x[i]) % n < h or (X[c] - x[i]) % n < h):
                            blocked = True
                            break
                if blocked:
                    continue
                y = list(x)
                y[i], y[j] = y[j], y[i]
                out.append((s, perm_rank(y), i, w, x[i], h))
    if not out:
        return np.zeros((0, 6), dtype=np.int64)
    return np.asarray(out, dtype=np.int64)
