"""Combinatorial automorphisms of decorated special polyhedra.

An automorphism consists of a vertex bijection, an edge bijection with
end correspondence, and a slot permutation at each vertex, compatible
with wing matchings and preserving decorations.  The search reduces to
automorphisms of a colored functional graph on germs: a germ bijection
commuting with the corner and traverse involutions and with the germ ->
vertex and germ -> edge projections induces slot permutations
automatically (commuting with corner forces the map on slot pairs
(i, j) -> (f(i), f(j)) to come from a single f per vertex).

``compute_aut`` uses the refinement/backtracking kernel; ``brute_force_aut``
is the independent oracle (raw enumeration over vertex bijections and
slot assignments) used to cross-check it.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import kernels
from .polyhedron import Ball, ball

IDENT4 = (0, 1, 2, 3)


@dataclass(frozen=True)
class PolyAutomorphism:
    """vmap: vertex -> vertex; emap: edge -> (edge, flip) where end k of the
    source goes to end k^flip of the image; smap: vertex -> 4-tuple giving
    the slot permutation (None on slots without an in-region edge)."""

    vmap: tuple
    emap: tuple
    smap: tuple

    @classmethod
    def from_dicts(cls, vmap, emap, smap):
        return cls(
            vmap=tuple(sorted(vmap.items())),
            emap=tuple(sorted(emap.items())),
            smap=tuple(sorted((v, tuple(s)) for v, s in smap.items())),
        )

    def vdict(self):
        return dict(self.vmap)

    def edict(self):
        return dict(self.emap)

    def sdict(self):
        return {v: list(s) for v, s in self.smap}

    def vertex_image(self, vid):
        return dict(self.vmap)[vid]

    def edge_image(self, eid):
        return dict(self.emap)[eid][0]

    @property
    def is_identity(self):
        return all(a == b for a, b in self.vmap) and all(
            a == b and f == 0 for a, (b, f) in self.emap
        )

    def compose(self, other):
        """self after other (apply ``other`` first)."""
        ov, oe, os_ = other.vdict(), other.edict(), other.sdict()
        sv, se, ss = self.vdict(), self.edict(), self.sdict()
        vmap = {v: sv[ov[v]] for v in ov}
        emap = {}
        for e, (e1, f1) in oe.items():
            e2, f2 = se[e1]
            emap[e] = (e2, f1 ^ f2)
        smap = {}
        for v, s1 in os_.items():
            s2 = ss[ov[v]]
            smap[v] = tuple(
                None if s1[i] is None or s2[s1[i]] is None else s2[s1[i]]
                for i in range(4)
            )
        return PolyAutomorphism.from_dicts(vmap, emap, smap)

    def inverse(self):
        vmap = {b: a for a, b in self.vmap}
        emap = {}
        for e, (e1, f) in self.emap:
            emap[e1] = (e, f)
        smap = {}
        for v, s in self.smap:
            inv = [None] * 4
            for i in range(4):
                if s[i] is not None:
                    inv[s[i]] = i
            smap[dict(self.vmap)[v]] = tuple(inv)
        return PolyAutomorphism.from_dicts(vmap, emap, smap)

    def verify(self, poly, decoration=None, vertex_ids=None, edge_ids=None):
        """Full consistency check; returns None or an error string."""
        vd, ed, sd = self.vdict(), self.edict(), self.sdict()
        vertex_ids = list(vd) if vertex_ids is None else list(vertex_ids)
        edge_ids = list(ed) if edge_ids is None else list(edge_ids)
        if sorted(vd.values()) != sorted(vd):
            return "vertex map is not a bijection"
        if sorted(e for e, _ in ed.values()) != sorted(ed):
            return "edge map is not a bijection"
        for v in vertex_ids:
            if poly.vertex(v).complete != poly.vertex(vd[v]).complete:
                return "completeness not preserved at %r" % (v,)
        for e in edge_ids:
            rec = poly.edge(e)
            e2, flip = ed[e]
            rec2 = poly.edge(e2)
            if decoration is not None and decoration(e) != decoration(e2):
                return "decoration changed on %r" % (e,)
            for k in (0, 1):
                v, s = rec.ends[k]
                v2, s2 = rec2.ends[k ^ flip]
                if vd.get(v) != v2:
                    return "end vertex mismatch on %r end %d" % (e, k)
                if sd[v][s] != s2:
                    return "slot mismatch on %r end %d" % (e, k)
            w2 = set(rec2.wings)
            for j0, j1 in rec.wings:
                a = sd[rec.ends[0][0]][j0]
                b = sd[rec.ends[1][0]][j1]
                pair = (a, b) if flip == 0 else (b, a)
                if pair not in w2:
                    return "wing pair %r of %r not preserved" % ((j0, j1), e)
        return None


def _decoration_classes(edge_ids, decoration):
    if decoration is None:
        return {e: 0 for e in edge_ids}
    values = sorted({decoration(e) for e in edge_ids})
    rank = {v: i for i, v in enumerate(values)}
    return {e: rank[decoration(e)] for e in edge_ids}


def germ_graph(poly, vertex_ids, edge_ids, decoration=None):
    """Colored functional graph whose automorphisms are Aut(P, c).

    Nodes: germs, then vertices, then edges (sorted ids).  Maps: corner,
    traverse, germ->vertex, germ->edge (-1 where undefined, e.g. corner at
    a frontier stub).  Returns (n, colors, maps, node_list).
    """
    vertex_ids = sorted(vertex_ids)
    edge_ids = sorted(edge_ids)
    edge_set = set(edge_ids)
    germs = []
    for eid in edge_ids:
        germs.extend(poly.germs_of_edge(eid))
    nodes = germs + [("V", v) for v in vertex_ids] + [("E", e) for e in edge_ids]
    index = {node: i for i, node in enumerate(nodes)}
    n = len(nodes)
    corner = [-1] * n
    trav = [-1] * n
    vert = [-1] * n
    edge = [-1] * n
    for g in germs:
        i = index[g]
        nxt, _ = _try_corner_for_graph(poly, g, edge_set)
        if nxt is not None:
            corner[i] = index[nxt]
        trav[i] = index[poly.traverse(g)]
        v = poly.edge(g[0]).ends[g[1]][0]
        vert[i] = index[("V", v)]
        edge[i] = index[("E", g[0])]

    dec_class = _decoration_classes(edge_ids, decoration)
    colors = []
    for g in germs:
        colors.append(0)
    for v in vertex_ids:
        colors.append(1 if poly.vertex(v).complete else 2)
    for e in edge_ids:
        colors.append(3 + dec_class[e])
    return n, colors, [corner, trav, vert, edge], nodes


def _try_corner_for_graph(poly, g, edge_set):
    eid, end, wing = g
    v, i = poly.edge(eid).ends[end]
    try:
        vrec = poly.vertex(v)
    except Exception:
        return None, "missing"
    slot = vrec.slots[wing]
    if slot is None:
        return None, "stub"
    e2, k2 = slot
    if e2 not in edge_set:
        return None, "outside"
    return (e2, k2, i), None


def _perm_to_automorphism(poly, nodes, perm, vertex_ids, edge_ids):
    index = {node: i for i, node in enumerate(nodes)}
    vmap = {}
    emap = {}
    for v in vertex_ids:
        img = nodes[perm[index[("V", v)]]]
        vmap[v] = img[1]
    flip = {}
    for e in edge_ids:
        img = nodes[perm[index[("E", e)]]]
        emap[e] = img[1]
    # flips and slot maps from germ images
    smap = {v: [None] * 4 for v in vertex_ids}
    for e in edge_ids:
        rec = poly.edge(e)
        g0 = (e, 0, rec.wing_labels(0)[0])
        img = nodes[perm[index[g0]]]
        flip[e] = img[1]
        for k in (0, 1):
            v, s = rec.ends[k]
            gk = (e, k, rec.wing_labels(k)[0])
            ge = nodes[perm[index[gk]]]
            e2, k2, _ = ge
            s2 = poly.edge(e2).ends[k2][1]
            smap[v][s] = s2
        # wing labels map: germ (e,k,w) -> (e2,k2,w2): the wing label w at
        # slot s of v maps to w2 at the image; fills smap on wing slots
        for k in (0, 1):
            v, _ = rec.ends[k]
            for w in rec.wing_labels(k):
                ge = nodes[perm[index[(e, k, w)]]]
                smap[v][w] = ge[2]
    emap2 = {e: (emap[e], flip[e]) for e in edge_ids}
    return PolyAutomorphism.from_dicts(vmap, emap2, {v: tuple(s) for v, s in smap.items()})


@dataclass
class AutGroup:
    elements: list
    generators: list
    order: int
    vertex_orbits: list
    edge_orbits: list

    def to_text(self):
        lines = ["order %d" % self.order]
        for g in self.generators:
            vd = g.vdict()
            lines.append("vperm: " + " ".join("%s->%s" % (a, vd[a]) for a in sorted(vd)))
        lines.append(
            "orbits: vertices %s | edges %s"
            % (
                " ".join("{%s}" % ",".join(o) for o in self.vertex_orbits),
                " ".join("{%s}" % ",".join(o) for o in self.edge_orbits),
            )
        )
        return "\n".join(lines) + "\n"


def _orbits(ids, images):
    """images: list of dicts id->id."""
    parent = {i: i for i in ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for m in images:
        for a, b in m.items():
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups = {}
    for i in ids:
        groups.setdefault(find(i), []).append(i)
    return [sorted(v) for _, v in sorted(groups.items())]


def _make_group(poly, elements, vertex_ids, edge_ids):
    elements = sorted(set(elements), key=lambda a: (a.vmap, a.emap, a.smap))
    generators = []
    generated = {e for e in elements if e.is_identity}
    idelem = next(e for e in elements if e.is_identity)
    for el in elements:
        if el in generated:
            continue
        generators.append(el)
        # close under composition with existing closure
        frontier = [el]
        generated.add(el)
        while frontier:
            x = frontier.pop()
            for y in list(generated) + generators:
                for z in (x.compose(y), y.compose(x)):
                    if z not in generated and z in set(elements):
                        generated.add(z)
                        frontier.append(z)
        if len(generated) == len(elements):
            break
    vertex_orbits = _orbits(list(vertex_ids), [e.vdict() for e in elements])
    edge_orbits = _orbits(list(edge_ids), [{a: b for a, (b, _) in e.emap} for e in elements])
    return AutGroup(
        elements=elements,
        generators=generators,
        order=len(elements),
        vertex_orbits=vertex_orbits,
        edge_orbits=edge_orbits,
    )


def compute_aut(poly, decoration=None, max_leaves=500000):
    """Full decoration-preserving automorphism group of a finite polyhedron."""
    vertex_ids = poly.vertex_ids()
    edge_ids = poly.edge_ids()
    n, colors, maps, nodes = germ_graph(poly, vertex_ids, edge_ids, decoration)
    perms = kernels.automorphisms(n, colors, maps, max_leaves=max_leaves)
    # germ-graph automorphisms are a superset of Aut(P, c): on loop edges a
    # germ permutation need not come from slot permutations, so verify and
    # keep only genuine polyhedron automorphisms (every element of Aut(P, c)
    # induces a germ permutation, so nothing is lost)
    elements = []
    for p in perms:
        a = _perm_to_automorphism(poly, nodes, p, vertex_ids, edge_ids)
        if a.verify(poly, decoration, vertex_ids, edge_ids) is None:
            elements.append(a)
    return _make_group(poly, elements, vertex_ids, edge_ids)


# ---------------------------------------------------------------------------
# oracle: exhaustive search


class SizeBoundExceeded(Exception):
    pass


def brute_force_aut(poly, decoration=None, max_vertices=8):
    """Exhaustive enumeration over vertex bijections and slot assignments.

    Oracle for compute_aut on small instances; same group, independent
    search (no refinement).
    """
    import itertools

    vertex_ids = poly.vertex_ids()
    edge_ids = poly.edge_ids()
    if len(vertex_ids) > max_vertices:
        raise SizeBoundExceeded("brute force limited to %d vertices" % max_vertices)
    elements = []
    slot_perms = list(itertools.permutations(range(4)))

    def edge_at(v, s):
        return poly.vertex(v).slots[s]

    def edge_compatible(e, vmap, sigmas):
        """Image edge well-defined and wing/decoration compatible, given
        that both end vertices have assigned slot permutations."""
        rec = poly.edge(e)
        (v0, s0), (v1, s1) = rec.ends
        entry = edge_at(vmap[v0], sigmas[v0][s0])
        if entry is None:
            return False
        e2, _ = entry
        rec2 = poly.edge(e2)
        if decoration is not None and decoration(e) != decoration(e2):
            return False
        t0 = (vmap[v0], sigmas[v0][s0])
        t1 = (vmap[v1], sigmas[v1][s1])
        if [t0, t1] == list(rec2.ends):
            flip = 0
        elif [t1, t0] == list(rec2.ends):
            flip = 1
        else:
            return False
        w2 = set(rec2.wings)
        for j0, j1 in rec.wings:
            a, b = sigmas[v0][j0], sigmas[v1][j1]
            pair = (a, b) if flip == 0 else (b, a)
            if pair not in w2:
                return False
        return True

    for vperm in itertools.permutations(vertex_ids):
        vmap = dict(zip(vertex_ids, vperm))
        assignment = {}

        def locally_consistent(v, sigma):
            sigmas = {**assignment, v: sigma}
            for i in range(4):
                entry = edge_at(v, i)
                if entry is None:
                    if edge_at(vmap[v], sigma[i]) is not None:
                        return False
                    continue
                e, _ = entry
                img_entry = edge_at(vmap[v], sigma[i])
                if img_entry is None:
                    return False
                if decoration is not None and decoration(e) != decoration(img_entry[0]):
                    return False
                vo = poly.edge(e).ends[0][0], poly.edge(e).ends[1][0]
                if all(u in sigmas for u in vo):
                    if not edge_compatible(e, vmap, sigmas):
                        return False
            return True

        def extend(k):
            if k == len(vertex_ids):
                emap = {}
                ok = True
                for e in edge_ids:
                    rec = poly.edge(e)
                    v0, s0 = rec.ends[0]
                    entry = edge_at(vmap[v0], assignment[v0][s0])
                    if entry is None:
                        ok = False
                        break
                    emap[e] = entry
                if ok:
                    a = PolyAutomorphism.from_dicts(
                        vmap, emap, {v: tuple(assignment[v]) for v in vertex_ids}
                    )
                    if a.verify(poly, decoration, vertex_ids, edge_ids) is None:
                        elements.append(a)
                return
            v = vertex_ids[k]
            for sigma in slot_perms:
                if locally_consistent(v, sigma):
                    assignment[v] = sigma
                    extend(k + 1)
                    del assignment[v]

        extend(0)

    # slot maps on unoccupied stubs are unconstrained; normalize to None
    cleaned = []
    for a in elements:
        sd = a.sdict()
        for v in vertex_ids:
            rec = poly.vertex(v)
            for i in range(4):
                if rec.slots[i] is None:
                    sd[v][i] = None
        cleaned.append(PolyAutomorphism.from_dicts(a.vdict(), a.edict(), sd))
    return _make_group(poly, cleaned, vertex_ids, edge_ids)


# ---------------------------------------------------------------------------
# ball automorphisms


def ball_automorphisms(poly, decoration, radius, base, max_leaves=500000):
    """Decoration-preserving automorphisms of ball(r), flagged with
    extendability to ball(r+1).

    Returns (ball_r, [(automorphism, extendable), ...]).  Automorphisms fix
    the incomplete-frontier marking setwise.
    """
    b_r = ball(poly, base, radius)
    b_r1 = ball(poly, base, radius + 1)
    aut_r = _ball_aut_elements(b_r, decoration, max_leaves)
    aut_r1 = _ball_aut_elements(b_r1, decoration, max_leaves)
    restricted = {restrict_automorphism(a, b_r1, b_r) for a in aut_r1}
    restricted.discard(None)
    flagged = [(a, a in restricted) for a in aut_r]
    return b_r, flagged


def _ball_aut_elements(b, decoration, max_leaves):
    vertex_ids = b.vertex_ids()
    edge_ids = b.edge_ids()
    n, colors, maps, nodes = germ_graph(b, vertex_ids, edge_ids, decoration)
    perms = kernels.automorphisms(n, colors, maps, max_leaves=max_leaves)
    out = []
    for p in perms:
        a = _perm_to_automorphism(b, nodes, p, vertex_ids, edge_ids)
        if a.verify(b, decoration, vertex_ids, edge_ids) is None:
            out.append(a)
    return sorted(set(out), key=lambda a: (a.vmap, a.emap, a.smap))


def restrict_automorphism(a, big, small):
    """Restriction of an automorphism of ``big`` to the subcomplex ``small``;
    None when it does not map the subcomplex onto itself."""
    vs = set(small.vertex_ids())
    es = set(small.edge_ids())
    vd, ed, sd = a.vdict(), a.edict(), a.sdict()
    if {vd[v] for v in vs} != vs or {ed[e][0] for e in es} != es:
        return None
    vmap = {v: vd[v] for v in vs}
    emap = {e: ed[e] for e in es}
    smap = {}
    for v in vs:
        rec = small.vertex(v)
        # any incident in-region edge constrains all four slots (its own
        # slot as an end, the rest as wing labels); an isolated vertex
        # constrains none
        has_edge = any(
            rec.slots[i] is not None and rec.slots[i][0] in es for i in range(4)
        )
        smap[v] = tuple(sd[v]) if has_edge else (None,) * 4
    return PolyAutomorphism.from_dicts(vmap, emap, smap)
