"""Deterministic corpus of small valid decorated special polyhedra.

Instances come from the configuration model on 4-valent graphs: pair up
the 4V half-edges at random, then draw random wing bijections.  Any such
assignment is a valid special polyhedron in the circuit-level encoding,
so the generator only needs to vary structure and decorations.
"""

import itertools
import random

from spineforge.polyhedron import Decoration, EdgeRec, SpecialPolyhedron, VertexRec


def random_special_polyhedron(rng, n_vertices):
    half_edges = [(f"v{v}", s) for v in range(n_vertices) for s in range(4)]
    rng.shuffle(half_edges)
    slots = {f"v{v}": [None] * 4 for v in range(n_vertices)}
    edges = {}
    for k in range(0, len(half_edges), 2):
        (v0, s0), (v1, s1) = sorted(half_edges[k : k + 2])
        eid = "e%d" % (k // 2)
        slots[v0][s0] = (eid, 0)
        slots[v1][s1] = (eid, 1)
        src = [j for j in range(4) if j != s0]
        dst = [j for j in range(4) if j != s1]
        rng.shuffle(dst)
        edges[eid] = EdgeRec(
            id=eid, ends=((v0, s0), (v1, s1)), wings=tuple(sorted(zip(src, dst)))
        )
    vertices = {
        v: VertexRec(id=v, slots=tuple(sl)) for v, sl in slots.items()
    }
    return SpecialPolyhedron(vertices=vertices, edges=edges)


def decorations_for(poly, rng):
    """A few decoration styles: constant, injective, small random."""
    eids = poly.edge_ids()
    out = [
        Decoration(values={e: 4 for e in eids}),
        Decoration(values={e: 4 + i for i, e in enumerate(eids)}),
    ]
    out.append(Decoration(values={e: rng.choice([4, 5, 6]) for e in eids}))
    return out


def corpus(seed=20240, sizes=(1, 2, 3, 4, 5, 6), per_size=4):
    """>= 50 (polyhedron, decoration) pairs, deterministic."""
    rng = random.Random(seed)
    out = []
    for n in sizes:
        for _ in range(per_size):
            p = random_special_polyhedron(rng, n)
            for c in decorations_for(p, rng):
                out.append((p, c))
    return out


def symmetric_triangle_polyhedron():
    """Three vertices, doubled triangle (two parallel edges per vertex
    pair); wing matchings chosen so the swap of u and v is an automorphism
    reversing the two u-v edges.  Used for edge-reversal tests."""
    names = ["u", "v", "w"]
    # edges: a0,a1 between u,v; b0,b1 between v,w; c0,c1 between w,u
    # slot layout: at each vertex, slots 0,1 toward one neighbour, 2,3
    # toward the other (cyclic)
    slots = {
        "u": [("a0", 0), ("a1", 0), ("c0", 1), ("c1", 1)],
        "v": [("a0", 1), ("a1", 1), ("b0", 0), ("b1", 0)],
        "w": [("b0", 1), ("b1", 1), ("c0", 0), ("c1", 0)],
    }
    def mk(eid, v0, s0, v1, s1, wings):
        return EdgeRec(id=eid, ends=((v0, s0), (v1, s1)), wings=tuple(sorted(wings)))

    edges = {
        "a0": mk("a0", "u", 0, "v", 0, ((1, 1), (2, 2), (3, 3))),
        "a1": mk("a1", "u", 1, "v", 1, ((0, 0), (2, 2), (3, 3))),
        "b0": mk("b0", "v", 2, "w", 0, ((0, 2), (1, 3), (3, 1))),
        "b1": mk("b1", "v", 3, "w", 1, ((0, 2), (1, 3), (2, 0))),
        "c0": mk("c0", "w", 2, "u", 2, ((0, 0), (1, 1), (3, 3))),
        "c1": mk("c1", "w", 3, "u", 3, ((0, 0), (1, 1), (2, 2))),
    }
    vertices = {v: VertexRec(id=v, slots=tuple(slots[v])) for v in names}
    return SpecialPolyhedron(vertices=vertices, edges=edges)


def find_edge_reversing_instance(seed=999, tries=4000):
    """Search small instances for a decorated polyhedron whose Aut contains
    an element mapping some edge to itself with flipped ends."""
    from spineforge.automorphism import compute_aut

    rng = random.Random(seed)
    for n in (2, 3, 4):
        for _ in range(tries // 3):
            p = random_special_polyhedron(rng, n)
            c = Decoration(values={e: 4 for e in p.edge_ids()})
            g = compute_aut(p, c)
            for a in g.elements:
                for e, (e2, flip) in a.emap:
                    if e == e2 and flip == 1:
                        return p, c, a
    raise RuntimeError("no edge-reversing instance found")
