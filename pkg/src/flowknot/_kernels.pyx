# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: GF(2) elimination and empty-rectangle enumeration.

Same signatures and outputs as ``flowknot._fallback``.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()


cdef inline int64_t _mod(int64_t a, int64_t n) nogil:
    cdef int64_t r = a % n
    if r < 0:
        r += n
    return r


cdef int64_t _perm_rank(int64_t* perm, int64_t n) nogil:
    cdef int64_t rank = 0, fact = 1, i, j, smaller
    for i in range(2, n + 1):
        fact *= i
    for i in range(n):
        fact //= n - i
        smaller = 0
        for j in range(i + 1, n):
            if perm[j] < perm[i]:
                smaller += 1
        rank += smaller * fact
    return rank


def perm_rank(perm):
    cdef cnp.ndarray[int64_t, ndim=1] p = np.ascontiguousarray(perm, dtype=np.int64)
    return _perm_rank(<int64_t*> p.data, p.shape[0])


def gf2_rank(mat):
    """Rank over GF(2) of a 0/1 ``uint8`` matrix, using 64-bit packed rows."""
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] a = np.ascontiguousarray(mat, dtype=np.uint8)
    cdef Py_ssize_t m = a.shape[0], n = a.shape[1]
    if m == 0 or n == 0:
        return 0
    cdef Py_ssize_t words = (n + 63) // 64
    cdef cnp.ndarray[cnp.uint64_t, ndim=2] rows = np.zeros((m, words), dtype=np.uint64)
    cdef Py_ssize_t i, j, w, q, r = 0, piv
    cdef uint64_t bit, tmp
    for i in range(m):
        for j in range(n):
            if a[i, j] & 1:
                rows[i, j >> 6] |= (<uint64_t> 1) << (j & 63)
    for j in range(n):
        if r == m:
            break
        w = j >> 6
        bit = (<uint64_t> 1) << (j & 63)
        piv = -1
        for i in range(r, m):
            if rows[i, w] & bit:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for i in range(words):
                tmp = rows[piv, i]
                rows[piv, i] = rows[r, i]
                rows[r, i] = tmp
        for i in range(r + 1, m):
            if rows[i, w] & bit:
                for q in range(w, words):
                    rows[i, q] ^= rows[r, q]
        r += 1
    return int(r)


def empty_rectangles(perms, O, X, bint avoid_markings):
    """Empty rectangles out of every state, as an ``(k, 6)`` int64 array."""
    cdef cnp.ndarray[int64_t, ndim=2] P = np.ascontiguousarray(perms, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] Om = np.ascontiguousarray(O, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] Xm = np.ascontiguousarray(X, dtype=np.int64)
    cdef Py_ssize_t N = P.shape[0], n = P.shape[1]
    cdef Py_ssize_t cap = max(<Py_ssize_t> 16, N * n * (n - 1))
    cdef cnp.ndarray[int64_t, ndim=2] out = np.empty((cap, 6), dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1] y = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t s, i, j, k, c, cnt = 0
    cdef int64_t w, h, xi
    cdef bint blocked
    for s in range(N):
        for i in range(n):
            xi = P[s, i]
            for j in range(n):
                if i == j:
                    continue
                w = _mod(j - i, n)
                h = _mod(P[s, j] - xi, n)
                blocked = False
                for k in range(n):
                    if 0 < _mod(k - i, n) < w and 0 < _mod(P[s, k] - xi, n) < h:
                        blocked = True
                        break
                if not blocked and avoid_markings:
                    for c in range(n):
                        if _mod(c - i, n) < w and (_mod(Om[c] - xi, n) < h or _mod(Xm[c] - xi, n) < h):
                            blocked = True
                            break
                if blocked:
                    continue
                for k in range(n):
                    y[k] = P[s, k]
                y[i] = P[s, j]
                y[j] = xi
                out[cnt, 0] = s
                out[cnt, 1] = _perm_rank(<int64_t*> y.data, n)
                out[cnt, 2] = i
                out[cnt, 3] = w
                out[cnt, 4] = xi
                out[cnt, 5] = h
                cnt += 1
    return out[:cnt].copy()
