"""Automorphism search vs the brute-force oracle, and ball automorphisms."""

import random

import pytest

from corpus import corpus, random_special_polyhedron
from spineforge.automorphism import (
    PolyAutomorphism,
    ball_automorphisms,
    brute_force_aut,
    compute_aut,
    germ_graph,
)
from spineforge.kernels import all_kernels
from spineforge.polyhedron import Decoration, ball, validate_special


def test_corpus_is_valid():
    instances = corpus()
    assert len(instances) >= 50
    seen = set()
    for p, c in instances:
        if id(p) in seen:
            continue
        seen.add(id(p))
        assert validate_special(p).ok


def test_compute_equals_brute_force_on_corpus():
    for p, c in corpus():
        g1 = compute_aut(p, c)
        g2 = brute_force_aut(p, c)
        assert g1.order == g2.order, (p.num_vertices(), g1.order, g2.order)
        assert g1.elements == g2.elements


def test_constant_decoration_symmetric_instance_has_order_ge_2():
    rng = random.Random(5)
    found = False
    for _ in range(200):
        p = random_special_polyhedron(rng, 2)
        c = Decoration(values={e: 4 for e in p.edge_ids()})
        if compute_aut(p, c).order >= 2:
            found = True
            break
    assert found


def test_injective_decoration_often_rigid():
    # distinct decorations on all edges leave little symmetry; verify the
    # group is exactly the brute-force group and identity is present
    rng = random.Random(6)
    p = random_special_polyhedron(rng, 4)
    c = Decoration(values={e: 4 + i for i, e in enumerate(p.edge_ids())})
    g = compute_aut(p, c)
    assert any(a.is_identity for a in g.elements)
    assert g.order == brute_force_aut(p, c).order


def test_group_axioms_closure_and_inverse():
    for p, c in corpus()[:20]:
        g = compute_aut(p, c)
        elems = set(g.elements)
        for a in g.elements:
            assert a.inverse() in elems
            for b in g.elements:
                assert a.compose(b) in elems


def test_decoration_preservation_cell_by_cell():
    for p, c in corpus()[:20]:
        g = compute_aut(p, c)
        for a in g.elements:
            for e, (e2, _) in a.emap:
                assert c(e) == c(e2)


def test_refinement_soundness_color_classes():
    # cells in different refinement classes are never mapped to each other
    from spineforge import kernels

    for p, c in corpus()[:10]:
        vids, eids = p.vertex_ids(), p.edge_ids()
        n, colors, maps, nodes = germ_graph(p, vids, eids, c)
        base, _ = kernels.refine(n, colors, maps)
        base = list(base)
        g = compute_aut(p, c)
        idx = {node: i for i, node in enumerate(nodes)}
        for a in g.elements:
            for v, v2 in a.vmap:
                assert base[idx[("V", v)]] == base[idx[("V", v2)]]
            for e, (e2, _) in a.emap:
                assert base[idx[("E", e)]] == base[idx[("E", e2)]]


def test_kernels_agree_on_germ_graphs():
    ks = all_kernels()
    if len(ks) < 2:
        pytest.skip("compiled kernel unavailable")
    for p, c in corpus()[:12]:
        vids, eids = p.vertex_ids(), p.edge_ids()
        n, colors, maps, _ = germ_graph(p, vids, eids, c)
        outs = [impl.automorphisms(n, colors, maps) for _, impl in ks]
        assert outs[0] == outs[1]


def test_generators_generate():
    for p, c in corpus()[:15]:
        g = compute_aut(p, c)
        if g.order == 1:
            assert len(g.generators) == 0 or all(a.is_identity for a in g.generators)
            continue
        produced = {a for a in g.elements if a.is_identity}
        frontier = list(g.generators)
        produced.update(frontier)
        while frontier:
            x = frontier.pop()
            for y in list(produced):
                for z in (x.compose(y), y.compose(x)):
                    if z not in produced:
                        produced.add(z)
                        frontier.append(z)
        assert produced == set(g.elements)


class TestBallAutomorphisms:
    def test_radius0_single_vertex(self):
        rng = random.Random(11)
        p = random_special_polyhedron(rng, 3)
        c = Decoration(values={e: 4 for e in p.edge_ids()})
        b, flagged = ball_automorphisms(p, c, 0, "v0")
        assert b.vertex_ids() == ["v0"]
        # no in-ball cells carry structure: only the trivial map
        assert len(flagged) == 1

    def test_extendable_counts_non_increasing(self):
        rng = random.Random(13)
        p = random_special_polyhedron(rng, 5)
        c = Decoration(values={e: 4 for e in p.edge_ids()})
        counts = []
        for r in range(0, 5):
            _, flagged = ball_automorphisms(p, c, r, "v0")
            counts.append(sum(1 for _, ext in flagged if ext))
        assert all(counts[i] >= counts[i + 1] for i in range(len(counts) - 1))

    def test_full_ball_matches_global_group(self):
        rng = random.Random(17)
        p = random_special_polyhedron(rng, 4)
        c = Decoration(values={e: 4 for e in p.edge_ids()})
        # radius beyond diameter: ball == whole polyhedron, no frontier
        b = ball(p, "v0", 50)
        if b.frontier_vertices:
            pytest.skip("disconnected sample")
        _, flagged = ball_automorphisms(p, c, 50, "v0")
        g = compute_aut(p, c)
        assert len(flagged) == g.order
        assert all(ext for _, ext in flagged)
