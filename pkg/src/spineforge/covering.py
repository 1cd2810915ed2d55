"""Presentation covers of P(np) with their deck actions.

The cover associated to a group oracle G has cells (g, base cell); wall
cells lift sheet-wise and crossing the 1-cell of a generator multiplies
the sheet by that generator's image in G.  Relator 2-cells close up in
the cover exactly because relators evaluate to the identity, which is
checked against the oracle on construction.

Deck transformations act by left multiplication on sheet labels; they
preserve incidence, wings, and the lifted decoration c~ = c o proj, and
fix every fiber setwise.  Ball statements are witnessed on balls centered
at the whole fiber over the base vertex (deck-invariant subcomplexes).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .automorphism import _ball_aut_elements, restrict_automorphism
from .polyhedron import (
    Decoration,
    EdgeRec,
    SpecialPolyhedron,
    StructuralError,
    VertexRec,
    ball,
    vertex_color,
)
from .presentation import evaluate_word


class OracleError(Exception):
    pass


class GroupOracle:
    """A finite multiplication table or a word oracle for free groups.

    Elements are id-safe names, identity first.  ``assign`` maps generator
    symbols of the *input* presentation to elements; normalized generators
    reach the oracle through their provenance words.
    """

    def __init__(self, elements, mult_fn, inverse_fn, assign, name=""):
        self.elements = list(elements) if elements is not None else None
        self._mult = mult_fn
        self._inv = inverse_fn
        self.assign = dict(assign)
        self.name = name

    @property
    def identity(self):
        if self.elements is not None:
            return self.elements[0]
        return "1"

    @property
    def order(self):
        return None if self.elements is None else len(self.elements)

    def mult(self, a, b):
        return self._mult(a, b)

    def inv(self, a):
        return self._inv(a)

    def evaluate(self, word):
        """Evaluate a word over the input presentation's generators."""
        return evaluate_word(word, self.assign, self.mult, self.identity, self.inv)

    def evaluate_normalized(self, word, provenance):
        acc = self.identity
        for sym, sign in word:
            x = self.evaluate(provenance[sym])
            acc = self.mult(acc, x if sign > 0 else self.inv(x))
        return acc

    def self_check(self):
        """Identity laws everywhere; associativity on a deterministic sample."""
        if self.elements is None:
            return
        e = self.identity
        for a in self.elements:
            if self.mult(e, a) != a or self.mult(a, e) != a:
                raise OracleError("identity law fails at %r" % a)
            if self.mult(a, self.inv(a)) != e:
                raise OracleError("inverse law fails at %r" % a)
        els = self.elements
        step = max(1, len(els) // 12)
        sample = els[::step]
        for a in sample:
            for b in sample:
                for c in sample:
                    if self.mult(self.mult(a, b), c) != self.mult(a, self.mult(b, c)):
                        raise OracleError("associativity fails at (%r,%r,%r)" % (a, b, c))


def trivial_oracle(gen_symbols):
    return GroupOracle(
        ["e"], lambda a, b: "e", lambda a: "e", {g: "e" for g in gen_symbols}, name="trivial"
    )


def cyclic_oracle(n, gen_symbols):
    """Z/n with every input generator mapped to the same generator 1."""
    names = ["e"] + ["g%d" % i for i in range(1, n)]

    def num(a):
        return 0 if a == "e" else int(a[1:])

    def nm(k):
        return names[k % n]

    return GroupOracle(
        names,
        lambda a, b: nm(num(a) + num(b)),
        lambda a: nm(-num(a)),
        {g: nm(1) for g in gen_symbols},
        name="Z/%d" % n,
    )


def oracle_from_table(text):
    """Parse the group oracle file format.

    ``group table`` header, a line with the n element names (identity
    first), then n rows of n products (row i, column j holds element_i *
    element_j).  Optionally a final line ``assign sym=el ...``; otherwise
    generator symbols are matched to equally named elements at cover time.

    ``group words <maxlen>`` selects the free-group word oracle instead.
    """
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise OracleError("empty oracle file")
    head = lines[0].split()
    if head[:2] == ["group", "words"]:
        maxlen = int(head[2])
        return word_oracle(maxlen)
    if head[:2] != ["group", "table"]:
        raise OracleError("missing 'group table' header")
    names = lines[1].split()
    n = len(names)
    if len(set(names)) != n:
        raise OracleError("duplicate element names")
    for nm in names:
        if not nm.replace("_", "").isalnum():
            raise OracleError("element name %r is not id-safe" % nm)
    rows = []
    assign = {}
    for ln in lines[2:]:
        parts = ln.split()
        if parts[0] == "assign":
            for chunk in parts[1:]:
                sym, el = chunk.split("=")
                assign[sym] = el
            continue
        rows.append(parts)
    if len(rows) != n or any(len(r) != n for r in rows):
        raise OracleError("table must be %d x %d" % (n, n))
    idx = {nm: i for i, nm in enumerate(names)}
    for r in rows:
        for x in r:
            if x not in idx:
                raise OracleError("unknown element %r in table" % x)
    table = {(a, b): rows[idx[a]][idx[b]] for a in names for b in names}
    ident = names[0]
    inv = {}
    for a in names:
        for b in names:
            if table[(a, b)] == ident:
                inv[a] = b
    if len(inv) != n:
        raise OracleError("some element has no inverse")
    oracle = GroupOracle(
        names,
        lambda a, b: table[(a, b)],
        lambda a: inv[a],
        assign,
        name="table[%d]" % n,
    )
    oracle.self_check()
    return oracle


def word_oracle(maxlen):
    """Free-group oracle on reduced words, truncated at ``maxlen``.

    Elements are encoded ``x.~y.z`` (``~`` marks an inverse letter); the
    identity is ``1``.  Exceeding the bound raises, and the failure
    propagates through lazy generation.
    """

    def decode(a):
        if a == "1":
            return []
        out = []
        for part in a.split("."):
            if part.startswith("~"):
                out.append((part[1:], -1))
            else:
                out.append((part, 1))
        return out

    def encode(w):
        if not w:
            return "1"
        return ".".join(("~" + s if sign < 0 else s) for s, sign in w)

    def mult(a, b):
        w = decode(a) + decode(b)
        out = []
        for sym, sign in w:
            if out and out[-1][0] == sym and out[-1][1] == -sign:
                out.pop()
            else:
                out.append((sym, sign))
        if len(out) > maxlen:
            raise OracleError("word oracle bound %d exceeded" % maxlen)
        return encode(out)

    def inv(a):
        return encode([(s, -sign) for s, sign in reversed(decode(a))])

    class _WordAssign(dict):
        def __missing__(self, sym):
            return sym

    return GroupOracle(None, mult, inv, _WordAssign(), name="words<=%d" % maxlen)


# ---------------------------------------------------------------------------
# the covered complex


def _cover_id(sheet, base_id):
    return "%s|%s" % (sheet, base_id)


def split_cover_id(cid):
    sheet, _, base = cid.partition("|")
    return sheet, base


class CoveredComplex(SpecialPolyhedron):
    """The G-labeled presentation cover of P(np)."""

    def __init__(self, base_complex, oracle):
        super().__init__(generator=self, name="cover(%s)" % oracle.name)
        self.base_complex = base_complex
        self.oracle = oracle
        np_pres = base_complex.normalized
        self.offsets = {}
        for eid, sym in base_complex.one_cells:
            self.offsets[eid] = oracle.evaluate(np_pres.provenance[sym])
        self._sheet_set = None if oracle.elements is None else set(oracle.elements)

    def _valid_sheet(self, s):
        return self._sheet_set is None or s in self._sheet_set

    def offset(self, base_eid):
        return self.offsets.get(base_eid, self.oracle.identity)

    def vertex_record(self, cid):
        sheet, base = split_cover_id(cid)
        if not self._valid_sheet(sheet):
            return None
        try:
            rec = self.base_complex.vertex(base)
        except StructuralError:
            return None
        slots = []
        for entry in rec.slots:
            if entry is None:
                slots.append(None)
                continue
            eid, k = entry
            if k == 0:
                s2 = sheet
            else:
                s2 = self.oracle.mult(sheet, self.oracle.inv(self.offset(eid)))
            slots.append((_cover_id(s2, eid), k))
        return VertexRec(id=cid, slots=tuple(slots), complete=rec.complete)

    def edge_record(self, cid):
        sheet, base = split_cover_id(cid)
        if not self._valid_sheet(sheet):
            return None
        try:
            rec = self.base_complex.edge(base)
        except StructuralError:
            return None
        (v0, s0), (v1, s1) = rec.ends
        far = self.oracle.mult(sheet, self.offset(base))
        return EdgeRec(
            id=cid,
            ends=((_cover_id(sheet, v0), s0), (_cover_id(far, v1), s1)),
            wings=rec.wings,
            complete=rec.complete,
        )

    def project(self, cid):
        return split_cover_id(cid)[1]

    def sheet_of(self, cid):
        return split_cover_id(cid)[0]

    def fiber_of_vertex(self, base_vid):
        if self.oracle.elements is None:
            raise OracleError("infinite oracle has no finite fibers")
        return [_cover_id(s, base_vid) for s in self.oracle.elements]

    @property
    def base_fiber(self):
        return self.fiber_of_vertex(self.base_complex.base_vertex)

    def lifted_decoration(self, base_decoration):
        return Decoration(fn=lambda eid: base_decoration(self.project(eid)))


def build_cover(base_complex, oracle):
    """Construct the cover; fails if some relator is not killed by G."""
    np_pres = base_complex.normalized
    for t, word in enumerate(np_pres.presentation.relators):
        val = oracle.evaluate_normalized(word, np_pres.provenance)
        if val != oracle.identity:
            raise OracleError(
                "relator %d evaluates to %r, not the identity; "
                "oracle is inconsistent with the presentation" % (t, val)
            )
    return CoveredComplex(base_complex, oracle)


def deck_automorphism(cover, g, region_ball):
    """The restriction of deck(g): (h, cell) -> (g h, cell) to a ball."""
    from .automorphism import PolyAutomorphism

    mul = cover.oracle.mult
    vmap = {}
    smap = {}
    for v in region_ball.vertex_ids():
        s, base = split_cover_id(v)
        vmap[v] = _cover_id(mul(g, s), base)
    emap = {}
    for e in region_ball.edge_ids():
        s, base = split_cover_id(e)
        emap[e] = (_cover_id(mul(g, s), base), 0)
    for v in region_ball.vertex_ids():
        rec = region_ball.vertex(v)
        has_edge = any(
            rec.slots[i] is not None and region_ball.has_edge(rec.slots[i][0])
            for i in range(4)
        )
        smap[v] = (0, 1, 2, 3) if has_edge else (None,) * 4
    return PolyAutomorphism.from_dicts(vmap, emap, smap)


# ---------------------------------------------------------------------------
# fiber rigidity reports


@dataclass
class FiberReport:
    radius: int
    group_order: int
    colors_distinct: bool
    fibers_preserved: bool
    automorphism_count: int
    extendable_count: int
    deck_all_present: bool

    def to_text(self):
        return (
            "fiber report (radius %d): |G|=%d colors-distinct=%s "
            "fibers-preserved=%s autos=%d extendable=%d deck-present=%s\n"
            % (
                self.radius,
                self.group_order,
                self.colors_distinct,
                self.fibers_preserved,
                self.automorphism_count,
                self.extendable_count,
                self.deck_all_present,
            )
        )


@dataclass
class StabilizationReport:
    counts: list = field(default_factory=list)  # (radius, extendable count)
    stabilization_radius: int = -1
    group_order: int = 0

    @property
    def stabilized(self):
        return self.stabilization_radius >= 0

    def to_text(self):
        lines = ["stabilization scan (|G| = %d):" % self.group_order]
        for r, c in self.counts:
            lines.append("  radius %d: extendable automorphisms %d" % (r, c))
        if self.stabilized:
            lines.append("stabilized at radius %d" % self.stabilization_radius)
        else:
            lines.append("not stabilized within the scanned radii")
        return "\n".join(lines) + "\n"


def _cover_ball_autos(cover, decoration, radius, cache):
    if radius not in cache:
        b = ball(cover, cover.base_fiber, radius)
        lifted = cover.lifted_decoration(decoration)
        cache[radius] = (b, _ball_aut_elements(b, lifted, max_leaves=500000))
    return cache[radius]


def verify_fiber_rigidity(cover, decoration, radius, _cache=None):
    """Single-radius report: colors, fiber preservation, extendable count.

    ``decoration`` is the base decoration; it must be injective on edges.
    """
    base = cover.base_complex
    bb = ball(base, base.base_vertex, radius)
    vals = [decoration(e) for e in bb.edge_ids()]
    if len(set(vals)) != len(vals):
        raise OracleError("base decoration is not injective on the ball")
    colors = [vertex_color(bb, decoration, v) for v in bb.complete_vertex_ids()]
    colors_distinct = len(set(colors)) == len(colors)

    cache = _cache if _cache is not None else {}
    b_r, aut_r = _cover_ball_autos(cover, decoration, radius, cache)
    b_r1, aut_r1 = _cover_ball_autos(cover, decoration, radius + 1, cache)
    restricted = {restrict_automorphism(a, b_r1, b_r) for a in aut_r1}
    restricted.discard(None)
    extendable = [a for a in aut_r if a in restricted]

    fibers_preserved = True
    for a in aut_r:
        for v, v2 in a.vmap:
            if cover.project(v) != cover.project(v2):
                fibers_preserved = False
        for e, (e2, _) in a.emap:
            if cover.project(e) != cover.project(e2):
                fibers_preserved = False

    deck_keys = set()
    for g in cover.oracle.elements:
        deck_keys.add(deck_automorphism(cover, g, b_r))
    deck_all_present = deck_keys <= set(aut_r)

    return FiberReport(
        radius=radius,
        group_order=cover.oracle.order,
        colors_distinct=colors_distinct,
        fibers_preserved=fibers_preserved,
        automorphism_count=len(aut_r),
        extendable_count=len(extendable),
        deck_all_present=deck_all_present,
    )


def stabilization_scan(cover, decoration, max_radius=80, consecutive=3):
    """Increase the ball radius until the extendable-automorphism count
    equals |G| for ``consecutive`` consecutive radii."""
    order = cover.oracle.order
    if order is None:
        raise OracleError("stabilization scan needs a finite oracle")
    report = StabilizationReport(group_order=order)
    cache = {}
    run = 0
    for r in range(1, max_radius + 1):
        fr = verify_fiber_rigidity(cover, decoration, r, _cache=cache)
        report.counts.append((r, fr.extendable_count))
        if fr.extendable_count == order:
            run += 1
            if run >= consecutive:
                report.stabilization_radius = r - consecutive + 1
                return report
        else:
            run = 0
        # drop balls no longer needed
        cache.pop(r - 1, None)
    return report
