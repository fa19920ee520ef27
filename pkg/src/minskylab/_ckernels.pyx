# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels. Same contracts as ``_pykernels``."""
import numpy as np
cimport numpy as cnp


def lex_normal(word, commute):
    if len(word) == 0:
        return []
    cdef cnp.uint8_t[:, :] com = np.ascontiguousarray(commute, dtype=np.uint8)
    cdef long[:] w = np.array(word, dtype=np.int_)
    cdef Py_ssize_t n = w.shape[0]
    cdef long[:] rest = w.copy()
    cdef Py_ssize_t m = n, i, j, best, k
    cdef long x
    cdef bint free
    out = []
    while m > 0:
        best = -1
        for i in range(m):
            x = rest[i]
            free = True
            for j in range(i):
                if not com[rest[j], x]:
                    free = False
                    break
            if free and (best < 0 or x < rest[best]):
                best = i
        out.append(rest[best])
        for k in range(best, m - 1):
            rest[k] = rest[k + 1]
        m -= 1
    return out


def two_factors(word, commute):
    if len(word) == 0:
        return set()
    cdef cnp.uint8_t[:, :] com = np.ascontiguousarray(commute, dtype=np.uint8)
    cdef long[:] w = np.array(word, dtype=np.int_)
    cdef Py_ssize_t n = w.shape[0], s, t, u, na
    cdef long x, y
    cdef bint ok
    cdef long[:] after = np.zeros(max(n, 1), dtype=np.int_)
    out = set()
    for s in range(n):
        x = w[s]
        na = 0
        for t in range(s + 1, n):
            y = w[t]
            ok = True
            for u in range(na):
                if not com[w[after[u]], y]:
                    ok = False
                    break
            if ok:
                out.add((x, y))
                if com[x, y]:
                    out.add((y, x))
            if not ok or not com[x, y]:
                after[na] = t
                na += 1
    return out


def check_assoc(table):
    cdef long[:, :] t = np.ascontiguousarray(table, dtype=np.int_)
    cdef Py_ssize_t n = t.shape[0], a, b, c
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if t[t[a, b], c] != t[a, t[b, c]]:
                    return (a, b, c)
    return None


cdef inline long _ev(long[:, :] t, long[:] word, long[:] assign, long zero):
    cdef Py_ssize_t i
    cdef long v = -2, y
    for i in range(word.shape[0]):
        y = zero if word[i] < 0 else assign[word[i]]
        v = y if v == -2 else t[v, y]
    return v


def find_counterexample(table, nvars, premises, conclusion, zero):
    cdef long[:, :] t = np.ascontiguousarray(table, dtype=np.int_)
    cdef long n = t.shape[0], z = zero if zero is not None else -1
    cdef long nv = nvars
    cdef long[:] assign = np.zeros(max(nv, 1), dtype=np.int_)
    cdef Py_ssize_t k, p, npre = len(premises)
    cdef bint good
    lhs = [np.array(u, dtype=np.int_) for u, _ in premises]
    rhs = [np.array(v, dtype=np.int_) for _, v in premises]
    cdef long[:] cu = np.array(conclusion[0], dtype=np.int_)
    cdef long[:] cv = np.array(conclusion[1], dtype=np.int_)
    cdef long[:] wu, wv
    while True:
        good = True
        for p in range(npre):
            wu = lhs[p]
            wv = rhs[p]
            if _ev(t, wu, assign, z) != _ev(t, wv, assign, z):
                good = False
                break
        if good and _ev(t, cu, assign, z) != _ev(t, cv, assign, z):
            return tuple(assign[k] for k in range(nv))
        # odometer, last variable fastest (matches itertools.product)
        k = nv - 1
        while k >= 0:
            assign[k] += 1
            if assign[k] < n:
                break
            assign[k] = 0
            k -= 1
        if k < 0:
            return None
