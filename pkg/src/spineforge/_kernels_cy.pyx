# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: partition refinement and automorphism search.

Same algorithm and output order as _kernels_py; the hot loops (signature
assembly, run detection, verification) are typed, ranking uses lexsort.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

KERNEL_NAME = "cython"

ctypedef cnp.int64_t I64


class SearchLimitExceeded(Exception):
    pass


cdef _rank_rows(cnp.ndarray[I64, ndim=2] sig):
    """Rank rows canonically (identical rows share a rank, ranks follow
    lexicographic row order).  Returns (colors array, nclasses)."""
    cdef Py_ssize_t n = sig.shape[0]
    cdef Py_ssize_t w = sig.shape[1]
    if n == 0:
        return np.empty(0, dtype=np.int64), 0
    cols = []
    cdef Py_ssize_t c
    for c in range(w - 1, -1, -1):
        cols.append(sig[:, c])
    cdef cnp.ndarray[I64, ndim=1] ordv = np.lexsort(tuple(cols)).astype(np.int64)
    cdef cnp.ndarray[I64, ndim=1] colors = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t k
    cdef I64 rank = 0
    cdef Py_ssize_t prev = ordv[0]
    colors[prev] = 0
    cdef bint differ
    for k in range(1, n):
        differ = False
        for c in range(w):
            if sig[ordv[k], c] != sig[prev, c]:
                differ = True
                break
        if differ:
            rank += 1
        colors[ordv[k]] = rank
        prev = ordv[k]
    return colors, int(rank + 1)


cdef list _as_arrays(fmaps_in):
    out = []
    for fm in fmaps_in:
        out.append(np.ascontiguousarray(fm, dtype=np.int64))
    return out


cdef _forward_round(Py_ssize_t n, cnp.ndarray[I64, ndim=1] colors, list fmaps):
    cdef Py_ssize_t nmaps = len(fmaps)
    cdef cnp.ndarray[I64, ndim=2] sig = np.empty((n, nmaps + 1), dtype=np.int64)
    cdef cnp.ndarray[I64, ndim=1] f
    cdef Py_ssize_t i, m
    cdef I64 j
    for i in range(n):
        sig[i, 0] = colors[i]
    for m in range(nmaps):
        f = fmaps[m]
        for i in range(n):
            j = f[i]
            sig[i, m + 1] = -1 if j < 0 else colors[j]
    return _rank_rows(sig)


cdef _inverse_round(Py_ssize_t n, cnp.ndarray[I64, ndim=1] colors, list fmaps):
    cdef Py_ssize_t nmaps = len(fmaps)
    cdef Py_ssize_t total = 0, i, m, pos = 0
    cdef cnp.ndarray[I64, ndim=1] f
    for m in range(nmaps):
        f = fmaps[m]
        for i in range(n):
            if f[i] >= 0:
                total += 1
    cdef cnp.ndarray[I64, ndim=1] tgt = np.empty(total, dtype=np.int64)
    cdef cnp.ndarray[I64, ndim=1] mid = np.empty(total, dtype=np.int64)
    cdef cnp.ndarray[I64, ndim=1] cc = np.empty(total, dtype=np.int64)
    for m in range(nmaps):
        f = fmaps[m]
        for i in range(n):
            if f[i] >= 0:
                tgt[pos] = f[i]
                mid[pos] = m
                cc[pos] = colors[i]
                pos += 1
    cdef cnp.ndarray[I64, ndim=1] order
    if total:
        order = np.lexsort((cc, mid, tgt)).astype(np.int64)
    else:
        order = np.empty(0, dtype=np.int64)
    # chunk ids must be a function of chunk content only (isomorphism
    # invariance), so collect keys first and number them in sorted order
    cdef list node_keys = [b""] * n
    cdef cnp.ndarray[I64, ndim=1] buf
    cdef Py_ssize_t k = 0, start, ln, t
    cdef I64 node
    while k < total:
        start = k
        node = tgt[order[k]]
        while k < total and tgt[order[k]] == node:
            k += 1
        ln = k - start
        buf = np.empty(2 * ln, dtype=np.int64)
        for t in range(ln):
            buf[2 * t] = mid[order[start + t]]
            buf[2 * t + 1] = cc[order[start + t]]
        node_keys[node] = buf.tobytes()
    chunk_ids = {key: r for r, key in enumerate(sorted(set(node_keys)))}
    cdef cnp.ndarray[I64, ndim=2] sig = np.empty((n, 2), dtype=np.int64)
    for i in range(n):
        sig[i, 0] = colors[i]
        sig[i, 1] = chunk_ids[node_keys[i]]
    return _rank_rows(sig)


def refine(n_py, colors_in, fmaps_in, max_rounds=0):
    """Stable coloring under forward images and inverse multisets."""
    cdef Py_ssize_t n = n_py
    if n == 0:
        return np.empty(0, dtype=np.int64), 0
    cdef cnp.ndarray[I64, ndim=1] colors = np.ascontiguousarray(colors_in, dtype=np.int64)
    cdef cnp.ndarray[I64, ndim=2] sig0 = colors.reshape(n, 1)
    colors, ncls = _rank_rows(sig0)
    cdef list fmaps = _as_arrays(fmaps_in)
    cdef Py_ssize_t rounds = 0
    while True:
        rounds += 1
        colors, ncls2 = _forward_round(n, colors, fmaps)
        colors, ncls2 = _inverse_round(n, colors, fmaps)
        if ncls2 == ncls or (max_rounds and rounds >= max_rounds):
            return colors, ncls2
        ncls = ncls2


cdef bint _verify(Py_ssize_t n, cnp.ndarray[I64, ndim=1] perm,
                  cnp.ndarray[I64, ndim=1] colors0, list fmaps):
    cdef Py_ssize_t i, m
    cdef I64 j, k
    cdef cnp.ndarray[I64, ndim=1] f
    for i in range(n):
        if colors0[perm[i]] != colors0[i]:
            return False
    for m in range(len(fmaps)):
        f = fmaps[m]
        for i in range(n):
            j = f[i]
            k = f[perm[i]]
            if j < 0:
                if k != -1:
                    return False
            elif k != perm[j]:
                return False
    return True


def automorphisms(n_py, colors0_in, fmaps_in, max_leaves=200000):
    """Enumerate every color/map-preserving permutation, sorted.

    Individualization-refinement with an explicit DFS stack; leaves are
    compared against the first leaf and verified exactly.
    """
    cdef Py_ssize_t n = n_py
    if n == 0:
        return [()]
    cdef cnp.ndarray[I64, ndim=1] colors0 = np.ascontiguousarray(colors0_in, dtype=np.int64)
    cdef list fmaps = _as_arrays(fmaps_in)
    base, ncls0 = refine(n, colors0, fmaps)

    cdef list autos = []
    cdef cnp.ndarray[I64, ndim=1] first = None
    cdef Py_ssize_t leaves = 0
    cdef list stack = [(base, ncls0)]
    cdef cnp.ndarray[I64, ndim=1] colors, lab, perm, nxt, counts, ref
    cdef Py_ssize_t i, x
    cdef long ncls, ncls2, target, best, c

    while stack:
        colors, ncls = stack.pop()
        leaves += 1
        if leaves > max_leaves:
            raise SearchLimitExceeded("automorphism search exceeded %d leaves" % max_leaves)
        if ncls == n:
            lab = np.empty(n, dtype=np.int64)
            for i in range(n):
                lab[colors[i]] = i
            if first is None:
                first = lab
                autos.append(tuple(range(n)))
                continue
            perm = np.empty(n, dtype=np.int64)
            for i in range(n):
                perm[first[i]] = lab[i]
            if _verify(n, perm, colors0, fmaps):
                autos.append(tuple(perm.tolist()))
            continue
        counts = np.bincount(colors, minlength=ncls)
        target = -1
        best = n + 1
        for c in range(ncls):
            if 1 < counts[c] < best:
                best = counts[c]
                target = c
        members = np.nonzero(colors == target)[0].tolist()
        for x in reversed(members):
            nxt = colors.copy()
            nxt[x] = ncls
            ref, ncls2 = refine(n, nxt, fmaps)
            stack.append((ref, ncls2))

    return sorted(autos)
