"""Pure-Python kernels: partition refinement and automorphism search.

Input model: n nodes, an initial integer coloring, and a list of
functional maps (arrays of length n with the image index or -1).  An
automorphism is a permutation p with colors[p[i]] == colors[i] and
p[f[i]] == f[p[i]] for every map f (and f[i] == -1 iff f[p[i]] == -1).

The compiled twin (_kernels_cy) implements the same algorithm with the
same deterministic output order; keep the two in lockstep.
"""

from __future__ import annotations

KERNEL_NAME = "python"


def _rank(keys):
    """Canonically renumber nodes by sorted signature order."""
    order = sorted(set(keys))
    lookup = {k: r for r, k in enumerate(order)}
    return [lookup[k] for k in keys], len(order)


def refine(n, colors, fmaps, max_rounds=0):
    """Stable coloring under forward images and inverse multisets."""
    colors, ncls = _rank(list(colors))
    rounds = 0
    while True:
        rounds += 1
        # forward half-round: own color plus image colors
        keys = []
        for i in range(n):
            sig = [colors[i]]
            for f in fmaps:
                j = f[i]
                sig.append(-1 if j < 0 else colors[j])
            keys.append(tuple(sig))
        colors, ncls2 = _rank(keys)
        # inverse half-round: sorted multiset of (map, color) of preimages
        buckets = [[] for _ in range(n)]
        for m_idx, f in enumerate(fmaps):
            for i in range(n):
                j = f[i]
                if j >= 0:
                    buckets[j].append((m_idx, colors[i]))
        keys = [(colors[i], tuple(sorted(buckets[i]))) for i in range(n)]
        colors, ncls3 = _rank(keys)
        if ncls3 == ncls or (max_rounds and rounds >= max_rounds):
            return colors, ncls3
        ncls = ncls3


def _classes(n, colors, ncls):
    cls = [[] for _ in range(ncls)]
    for i in range(n):
        cls[colors[i]].append(i)
    return cls


def _verify(n, perm, colors0, fmaps):
    for i in range(n):
        if colors0[perm[i]] != colors0[i]:
            return False
    for f in fmaps:
        for i in range(n):
            j = f[i]
            k = f[perm[i]]
            if j < 0:
                if k != -1:
                    return False
            elif k != perm[j]:
                return False
    return True


class SearchLimitExceeded(Exception):
    pass


def automorphisms(n, colors0, fmaps, max_leaves=200000):
    """Enumerate every color/map-preserving permutation, sorted.

    Individualization-refinement: branch on the smallest non-singleton
    class, compare each discrete leaf against the first leaf reached, and
    keep candidates that verify exactly.
    """
    if n == 0:
        return [()]
    colors0 = list(colors0)
    base, ncls = refine(n, colors0, fmaps)
    state = {"first": None, "leaves": 0}
    autos = []

    def rec(colors, ncls):
        state["leaves"] += 1
        if state["leaves"] > max_leaves:
            raise SearchLimitExceeded("automorphism search exceeded %d leaves" % max_leaves)
        if ncls == n:
            # discrete: rank -> node
            lab = [0] * n
            for i in range(n):
                lab[colors[i]] = i
            if state["first"] is None:
                state["first"] = lab
                autos.append(tuple(range(n)))
                return
            first = state["first"]
            perm = [0] * n
            for r in range(n):
                perm[first[r]] = lab[r]
            if _verify(n, perm, colors0, fmaps):
                autos.append(tuple(perm))
            return
        cls = _classes(n, colors, ncls)
        target = min(
            (c for c in range(ncls) if len(cls[c]) > 1),
            key=lambda c: (len(cls[c]), c),
        )
        for x in cls[target]:
            nxt = list(colors)
            # individualize x: split it off as a new highest color
            nxt[x] = ncls
            ref, ncls2 = refine(n, nxt, fmaps)
            rec(ref, ncls2)

    rec(base, ncls)
    return sorted(autos)
