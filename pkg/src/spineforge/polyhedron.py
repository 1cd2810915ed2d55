"""Cell encoding of special polyhedra.

A special polyhedron is stored by its singular graph plus wing matchings:
every vertex carries four edge-end slots (the tetrahedral local model),
every edge carries three wings at each end, a wing at an end attached at
slot i being labelled by a slot index j != i of that vertex.  Faces are
never stored; they are recovered by tracing germs.

A germ is a triple (edge id, end index, wing label).  Two involutions act
on the germ set:

* corner:   (e, end at (v,i), j) -> the germ at (v, j) with wing i, i.e.
  the other side of the face corner {i, j} at v;
* traverse: (e, end, j)          -> the germ at the other end of e with
  wing given by the wing matching.

Faces are the alternating corner/traverse cycles; each germ lies on
exactly one cycle, and each cycle runs over every wing strip of its face
exactly once (so a cycle has twice as many germs as strips).  Finite and
lazily generated (infinite, locally finite) polyhedra share one
interface; lazy cells come from a deterministic generator keyed by
canonical string ids.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class StructuralError(Exception):
    """A cell reference does not resolve; distinct from validation failure."""


class IncompleteRegionError(Exception):
    """A face trace escaped the generated region; enlarge the ball."""


@dataclass(frozen=True)
class VertexRec:
    id: str
    # slots[i] is (edge_id, end_index) or None for an unoccupied stub
    slots: tuple
    complete: bool = True

    def occupied(self):
        return [i for i in range(4) if self.slots[i] is not None]


@dataclass(frozen=True)
class EdgeRec:
    id: str
    # ends = ((v0, slot0), (v1, slot1))
    ends: tuple
    # wings: three (j0, j1) pairs sorted by j0; j0 ranges over slot labels
    # != slot0 at end0, j1 over labels != slot1 at end1
    wings: tuple
    complete: bool = True

    def wing_labels(self, k):
        s = self.ends[k][1]
        return tuple(j for j in range(4) if j != s)

    def wing_map(self, k):
        """Wing bijection from end k to the other end."""
        if k == 0:
            return {a: b for a, b in self.wings}
        return {b: a for a, b in self.wings}


class SpecialPolyhedron:
    """A finite or lazily generated special polyhedron.

    Finite polyhedra hold explicit record dicts.  Lazy ones delegate to a
    generator object exposing ``vertex_record(vid)`` and
    ``edge_record(eid)`` (returning None for unknown ids); records are
    memoized, so repeated ball extractions observe identical cells.
    """

    def __init__(self, vertices=None, edges=None, generator=None, name=""):
        self._vertices = dict(vertices) if vertices is not None else None
        self._edges = dict(edges) if edges is not None else None
        self._gen = generator
        self.name = name
        if self._gen is None and self._vertices is None:
            self._vertices, self._edges = {}, {}
        self._vcache = {}
        self._ecache = {}

    @property
    def is_finite(self):
        return self._gen is None

    def vertex(self, vid) -> VertexRec:
        if self._vertices is not None:
            try:
                return self._vertices[vid]
            except KeyError:
                raise StructuralError("unknown vertex %r" % (vid,)) from None
        rec = self._vcache.get(vid)
        if rec is None:
            rec = self._gen.vertex_record(vid)
            if rec is None:
                raise StructuralError("unknown vertex %r" % (vid,))
            self._vcache[vid] = rec
        return rec

    def edge(self, eid) -> EdgeRec:
        if self._edges is not None:
            try:
                return self._edges[eid]
            except KeyError:
                raise StructuralError("unknown edge %r" % (eid,)) from None
        rec = self._ecache.get(eid)
        if rec is None:
            rec = self._gen.edge_record(eid)
            if rec is None:
                raise StructuralError("unknown edge %r" % (eid,))
            self._ecache[eid] = rec
        return rec

    def has_vertex(self, vid):
        try:
            self.vertex(vid)
            return True
        except StructuralError:
            return False

    def has_edge(self, eid):
        try:
            self.edge(eid)
            return True
        except StructuralError:
            return False

    def vertex_ids(self):
        if self._vertices is None:
            raise StructuralError("infinite polyhedron has no vertex listing")
        return sorted(self._vertices)

    def edge_ids(self):
        if self._edges is None:
            raise StructuralError("infinite polyhedron has no edge listing")
        return sorted(self._edges)

    def num_vertices(self):
        return len(self._vertices)

    def num_edges(self):
        return len(self._edges)

    def traverse(self, g):
        eid, end, wing = g
        rec = self.edge(eid)
        return (eid, 1 - end, rec.wing_map(end)[wing])

    def corner(self, g):
        """Pass through the vertex at the germ's end along face corner {i, j}.

        Returns None when the slot is empty or the vertex unknown; use
        ``_try_corner`` for the stop reason.
        """
        nxt, _ = _try_corner(self, g, None)
        return nxt

    def germs_of_edge(self, eid):
        rec = self.edge(eid)
        return [(eid, k, w) for k in (0, 1) for w in rec.wing_labels(k)]


# ---------------------------------------------------------------------------
# face tracing


def _try_corner(poly, g, present):
    """Corner step with stop diagnostics: returns (germ, None) or (None, reason)."""
    eid, end, wing = g
    v, i = poly.edge(eid).ends[end]
    try:
        vrec = poly.vertex(v)
    except StructuralError:
        return None, ("missing-vertex", v)
    slot = vrec.slots[wing]
    if slot is None:
        if vrec.complete:
            return None, ("empty-slot", v)
        return None, ("frontier-vertex", v)
    e2, k2 = slot
    if present is not None:
        if e2 not in present:
            return None, ("edge-outside-region", e2)
    elif not poly.has_edge(e2):
        return None, ("edge-outside-region", e2)
    return (e2, k2, i), None


def _walk_dir(poly, start, present, first_corner):
    """Alternating walk from ``start``; returns (germs, closed, stop_reason)."""
    seq = [start]
    g = start
    step_corner = first_corner
    while True:
        if step_corner:
            nxt, reason = _try_corner(poly, g, present)
            if nxt is None:
                return seq, False, reason
        else:
            try:
                nxt = poly.traverse(g)
            except KeyError:
                # broken wing bijection; reported separately by validation
                return seq, False, ("bad-wing", g[0])
        if nxt == start:
            return seq, True, None
        seq.append(nxt)
        g = nxt
        step_corner = not step_corner


@dataclass(frozen=True)
class FaceCircuit:
    """An alternating corner/traverse cycle of germs (a face), or a maximal
    open walk when the trace leaves the available region."""

    germs: tuple
    closed: bool
    stops: tuple = ()

    @property
    def id(self):
        return min(self.germs)

    def edges(self):
        return sorted({g[0] for g in self.germs})

    def strip_count(self):
        return len(self.germs) // 2


def _trace_from(poly, start, present):
    fwd, closed, stop_f = _walk_dir(poly, start, present, True)
    if closed:
        return FaceCircuit(tuple(_canonical_cycle(fwd)), True)
    back, closed_b, stop_b = _walk_dir(poly, start, present, False)
    # corner/traverse are involutions, so the backward walk cannot close
    # when the forward one did not
    seq = list(reversed(back)) + fwd[1:]
    if seq[0] > seq[-1]:
        seq.reverse()
        stop_f, stop_b = stop_b, stop_f
    return FaceCircuit(tuple(seq), False, stops=(stop_b, stop_f))


def _canonical_cycle(seq):
    k = seq.index(min(seq))
    rot = seq[k:] + seq[:k]
    if len(rot) > 2:
        rev = [rot[0]] + list(reversed(rot[1:]))
        if rev[1:] < rot[1:]:
            return rev
    return rot


def trace_faces(poly, region=None, require_closed=False):
    """Trace all face circuits meeting the region.

    ``region`` is an iterable of edge ids (default: all edges of a finite
    polyhedron).  Circuits are canonicalized to start at their least germ.
    With ``require_closed``, an IncompleteRegionError is raised if any
    trace escapes the region.
    """
    edge_ids = poly.edge_ids() if region is None else sorted(region)
    present = set(edge_ids)
    seen = set()
    circuits = []
    for eid in edge_ids:
        for g in poly.germs_of_edge(eid):
            if g in seen:
                continue
            circ = _trace_from(poly, g, present)
            seen.update(circ.germs)
            if not circ.closed and require_closed:
                raise IncompleteRegionError(
                    "face trace through %r leaves the region (%s); enlarge the ball"
                    % (g, circ.stops)
                )
            circuits.append(circ)
    circuits.sort(key=lambda c: c.germs)
    return circuits


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    kind: str
    cells: tuple
    message: str


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def add(self, kind, cells, message):
        self.violations.append(Violation(kind, tuple(cells), message))

    def interior(self):
        """Violations not attributable to a ball frontier."""
        return [v for v in self.violations if v.kind != "frontier"]

    def to_text(self):
        if self.ok:
            return "valid: no violations\n"
        lines = ["invalid: %d violation(s)" % len(self.violations)]
        for v in self.violations:
            lines.append("  [%s] %s: %s" % (v.kind, ",".join(map(str, v.cells)), v.message))
        return "\n".join(lines) + "\n"


_FRONTIER_REASONS = {"frontier-vertex", "edge-outside-region"}


def validate_special(poly, region=None):
    """Check the special-polyhedron invariants on a finite polyhedron or ball.

    Returns a report listing every violated invariant with the offending
    cells.  Cells marked incomplete (ball frontier) are exempt from the
    occupancy checks and recorded under the ``frontier`` kind, so a ball of
    a correct lazy polyhedron has an empty ``report.interior()``.
    """
    if region is not None:
        vertex_ids = sorted(region["vertices"])
        edge_ids = sorted(region["edges"])
    else:
        vertex_ids = poly.vertex_ids()
        edge_ids = poly.edge_ids()
    report = ValidationReport()
    edge_set = set(edge_ids)

    for vid in vertex_ids:
        rec = poly.vertex(vid)
        occupied = rec.occupied()
        if not rec.complete:
            report.add("frontier", [vid], "vertex on ball frontier (incomplete)")
        elif len(occupied) != 4:
            report.add(
                "slot-occupancy",
                [vid],
                "vertex has %d occupied slots, expected 4" % len(occupied),
            )
        ends = [rec.slots[i] for i in occupied]
        if len(set(ends)) != len(ends):
            report.add("slot-occupancy", [vid], "duplicate edge-end in slots")
        for i in occupied:
            eid, k = rec.slots[i]
            if eid in edge_set or poly.has_edge(eid):
                erec = poly.edge(eid)
                if erec.ends[k] != (vid, i):
                    report.add(
                        "incidence",
                        [vid, eid],
                        "edge end %d does not point back at (%s, slot %d)" % (k, vid, i),
                    )
            elif rec.complete:
                raise StructuralError("vertex %r references unknown edge %r" % (vid, eid))

    for eid in edge_ids:
        rec = poly.edge(eid)
        for k in (0, 1):
            v, s = rec.ends[k]
            if not 0 <= s <= 3:
                report.add("incidence", [eid], "slot index %r out of range" % (s,))
            elif not poly.has_vertex(v):
                raise StructuralError("edge %r references unknown vertex %r" % (eid, v))
        src = sorted(a for a, _ in rec.wings)
        dst = sorted(b for _, b in rec.wings)
        if src != sorted(rec.wing_labels(0)) or dst != sorted(rec.wing_labels(1)):
            report.add(
                "wing-bijection",
                [eid],
                "wings %r are not a bijection %r -> %r"
                % (rec.wings, sorted(rec.wing_labels(0)), sorted(rec.wing_labels(1))),
            )

    for circ in trace_faces(poly, region=edge_ids):
        if circ.closed:
            continue
        reasons = {r[0] for r in circ.stops if r is not None}
        cells = sorted({r[1] for r in circ.stops if r is not None})
        if reasons <= _FRONTIER_REASONS:
            report.add("frontier", cells, "face trace reaches the region frontier")
        else:
            report.add(
                "face-closure",
                cells or sorted({g[0] for g in circ.germs}),
                "face trace does not close (%s)" % (sorted(reasons),),
            )
    return report


# ---------------------------------------------------------------------------
# regularity, decorations, colors


def is_regular(poly, region=None):
    """More than two vertices and every edge has distinct endpoints."""
    if region is not None:
        vertex_ids = list(region["vertices"])
        edge_ids = region["edges"]
    else:
        vertex_ids = poly.vertex_ids()
        edge_ids = poly.edge_ids()
    if len(vertex_ids) <= 2:
        return False
    for eid in edge_ids:
        rec = poly.edge(eid)
        if rec.ends[0][0] == rec.ends[1][0]:
            return False
    return True


class Decoration:
    """Map from edge ids to natural numbers, total on generated edges."""

    def __init__(self, values=None, fn=None):
        self._values = dict(values) if values is not None else None
        self._fn = fn
        if self._values is None and self._fn is None:
            self._values = {}

    def __call__(self, eid):
        if self._values is not None and eid in self._values:
            return self._values[eid]
        if self._fn is not None:
            return self._fn(eid)
        raise KeyError("edge %r is not decorated" % (eid,))

    def defined_on(self, eid):
        try:
            self(eid)
            return True
        except KeyError:
            return False


def is_big(poly, decoration, region=None):
    """Regular and every edge decorated with a value >= 4."""
    if not is_regular(poly, region=region):
        return False
    edge_ids = region["edges"] if region is not None else poly.edge_ids()
    return all(decoration(eid) >= 4 for eid in edge_ids)


@dataclass(frozen=True)
class VertexColor:
    """Decorations of the four incident edges, listed by slot index.

    Compared as multisets; the slot listing is retained for inspection.
    """

    by_slot: tuple

    @property
    def multiset(self):
        return tuple(sorted(self.by_slot))

    def __eq__(self, other):
        return isinstance(other, VertexColor) and self.multiset == other.multiset

    def __hash__(self):
        return hash(self.multiset)


def vertex_color(poly, decoration, vid):
    rec = poly.vertex(vid)
    vals = []
    for i in range(4):
        if rec.slots[i] is None:
            raise KeyError("vertex %r has an unoccupied slot %d" % (vid, i))
        eid = rec.slots[i][0]
        if not decoration.defined_on(eid):
            raise KeyError("incident edge %r is undecorated" % (eid,))
        vals.append(decoration(eid))
    return VertexColor(tuple(vals))


# ---------------------------------------------------------------------------
# balls


class Ball(SpecialPolyhedron):
    """Finite subcomplex of cells within incidence distance r of a base.

    Distances live in the bipartite vertex-edge incidence graph.  Endpoints
    of included edges are always present (possibly one step beyond r) so
    edge records resolve; vertices whose star is not fully present are
    marked incomplete.  Monotone: ball(r) is a subcomplex of ball(r+1).
    """

    def __init__(self, parent, base, radius, vertices, edges, distances, frontier):
        super().__init__(vertices=vertices, edges=edges, name="%s|ball%d" % (parent.name, radius))
        self.parent = parent
        self.base = base
        self.radius = radius
        self.distances = distances
        self.frontier_vertices = frontier

    def region(self):
        return {"vertices": set(self._vertices), "edges": set(self._edges)}

    def complete_vertex_ids(self):
        return [v for v in self.vertex_ids() if self._vertices[v].complete]

    def interior_edge_ids(self):
        """Edges with both endpoints complete."""
        out = []
        for eid in self.edge_ids():
            rec = self._edges[eid]
            if all(self._vertices[v].complete for v, _ in rec.ends):
                out.append(eid)
        return out


def ball(poly, base, radius):
    """Extract the radius-r incidence ball around a base vertex (or several).

    A multi-vertex base gives the union ball; fiber-centered balls of
    covers (which deck transformations preserve setwise) use this.
    """
    bases = [base] if isinstance(base, str) else sorted(base)
    dist = {}
    frontier_next = []
    for b in bases:
        poly.vertex(b)
        dist[("V", b)] = 0
        frontier_next.append(("V", b))
    level = 0
    while frontier_next and level < radius:
        level += 1
        frontier, frontier_next = frontier_next, []
        for kind, cid in frontier:
            if kind == "V":
                rec = poly.vertex(cid)
                for i in rec.occupied():
                    key = ("E", rec.slots[i][0])
                    if key not in dist:
                        dist[key] = level
                        frontier_next.append(key)
            else:
                rec = poly.edge(cid)
                for v, _ in rec.ends:
                    key = ("V", v)
                    if key not in dist:
                        dist[key] = level
                        frontier_next.append(key)

    edge_ids = {cid for (kind, cid) in dist if kind == "E"}
    vertex_ids = {cid for (kind, cid) in dist if kind == "V"}
    for eid in edge_ids:
        for v, _ in poly.edge(eid).ends:
            if v not in vertex_ids:
                vertex_ids.add(v)
                dist[("V", v)] = radius + 1

    vertices = {}
    frontier = set()
    for vid in vertex_ids:
        rec = poly.vertex(vid)
        complete = rec.complete and all(
            rec.slots[i] is not None and rec.slots[i][0] in edge_ids for i in range(4)
        )
        if not complete:
            frontier.add(vid)
        vertices[vid] = VertexRec(id=rec.id, slots=rec.slots, complete=complete)
    edges = {eid: poly.edge(eid) for eid in edge_ids}
    distances = {cid: d for (_, cid), d in dist.items()}
    return Ball(poly, tuple(bases), radius, vertices, edges, distances, frontier)


def euler_characteristic(poly):
    """V - E + F for a finite, fully traced polyhedron."""
    vids = poly.vertex_ids()
    eids = poly.edge_ids()
    if not vids and not eids:
        return 0
    circuits = trace_faces(poly, require_closed=True)
    return len(vids) - len(eids) + len(circuits)


# ---------------------------------------------------------------------------
# text format (specpoly v1)


def to_text(poly, decoration=None):
    """Serialize a finite polyhedron in the line-oriented specpoly format."""
    lines = ["specpoly v1"]
    for vid in poly.vertex_ids():
        lines.append("vertex %s" % vid)
    for eid in poly.edge_ids():
        rec = poly.edge(eid)
        (v0, s0), (v1, s1) = rec.ends
        wings = ",".join("%d->%d" % (a, b) for a, b in rec.wings)
        lines.append("edge %s %s %d %s %d wings %s" % (eid, v0, s0, v1, s1, wings))
    if decoration is not None:
        for eid in poly.edge_ids():
            lines.append("decor %s %d" % (eid, decoration(eid)))
    return "\n".join(lines) + "\n"


class FormatError(Exception):
    pass


def from_text(text):
    """Parse the specpoly format; returns (polyhedron, decoration or None)."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0] != "specpoly v1":
        raise FormatError("missing 'specpoly v1' header")
    vertices = {}
    edge_specs = []
    decor = {}
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "vertex":
            if len(parts) != 2:
                raise FormatError("malformed vertex line: %r" % ln)
            vertices[parts[1]] = [None] * 4
        elif parts[0] == "edge":
            if len(parts) != 8 or parts[6] != "wings":
                raise FormatError("malformed edge line: %r" % ln)
            eid, v0, s0, v1, s1 = parts[1:6]
            try:
                s0, s1 = int(s0), int(s1)
            except ValueError:
                raise FormatError("bad slot index in: %r" % ln) from None
            wings = []
            for chunk in parts[7].split(","):
                if "->" not in chunk:
                    raise FormatError("bad wing spec %r" % chunk)
                a, b = chunk.split("->")
                try:
                    wings.append((int(a), int(b)))
                except ValueError:
                    raise FormatError("bad wing spec %r" % chunk) from None
            edge_specs.append((eid, v0, s0, v1, s1, tuple(sorted(wings))))
        elif parts[0] == "decor":
            if len(parts) != 3:
                raise FormatError("malformed decor line: %r" % ln)
            try:
                decor[parts[1]] = int(parts[2])
            except ValueError:
                raise FormatError("bad decoration value in: %r" % ln) from None
        else:
            raise FormatError("unknown directive %r" % parts[0])

    edges = {}
    for eid, v0, s0, v1, s1, wings in edge_specs:
        for v, s, k in ((v0, s0, 0), (v1, s1, 1)):
            if v not in vertices:
                raise FormatError("edge %s references unknown vertex %s" % (eid, v))
            if not 0 <= s <= 3:
                raise FormatError("edge %s slot %d out of range" % (eid, s))
            if vertices[v][s] is not None:
                raise FormatError("slot %d of vertex %s doubly occupied" % (s, v))
            vertices[v][s] = (eid, k)
        edges[eid] = EdgeRec(id=eid, ends=((v0, s0), (v1, s1)), wings=wings)
    vrecs = {
        vid: VertexRec(id=vid, slots=tuple(slots), complete=all(s is not None for s in slots))
        for vid, slots in vertices.items()
    }
    poly = SpecialPolyhedron(vertices=vrecs, edges=edges)
    return poly, (Decoration(values=decor) if decor else None)


def build_from_faces(vertex_slot_edges, face_cycles):
    """Assemble a polyhedron from explicit face boundary cycles.

    ``vertex_slot_edges``: {vid: [slot0_entry, .., slot3_entry]} with
    entries (edge_id, end) or None.  ``face_cycles``: iterable of cyclic
    lists [(eid, enter_end), ...]; entry k says the face path traverses eid
    from ``enter_end`` to the opposite end, where the next edge is entered.
    Wing matchings are derived: along each traversal the face occupies the
    wing labelled by the neighbouring edge's slot at each end.  Raises
    StructuralError if the data does not define a special polyhedron.
    """
    slot_of_end = {}
    for vid, slots in vertex_slot_edges.items():
        for i, entry in enumerate(slots):
            if entry is not None:
                if entry in slot_of_end:
                    raise StructuralError("edge end %r occupies two slots" % (entry,))
                slot_of_end[entry] = (vid, i)

    pair_lists = {}
    for cycle in face_cycles:
        n = len(cycle)
        for k in range(n):
            eid, enter = cycle[k]
            prev_eid, prev_enter = cycle[(k - 1) % n]
            next_eid, next_enter = cycle[(k + 1) % n]
            v_prev, slot_prev = slot_of_end[(prev_eid, 1 - prev_enter)]
            v_in, _ = slot_of_end[(eid, enter)]
            if v_prev != v_in:
                raise StructuralError(
                    "face cycle broken entering %r: %r != %r" % (eid, v_prev, v_in)
                )
            v_out, _ = slot_of_end[(eid, 1 - enter)]
            v_next, slot_next = slot_of_end[(next_eid, next_enter)]
            if v_out != v_next:
                raise StructuralError(
                    "face cycle broken leaving %r: %r != %r" % (eid, v_out, v_next)
                )
            wing_enter, wing_leave = slot_prev, slot_next
            pair = (wing_enter, wing_leave) if enter == 0 else (wing_leave, wing_enter)
            pair_lists.setdefault(eid, []).append(pair)

    edges = {}
    for eid in sorted({entry[0] for entry in slot_of_end}):
        pairs = pair_lists.get(eid, [])
        if len(pairs) != 3:
            raise StructuralError(
                "edge %r carries %d face strips, expected 3" % (eid, len(pairs))
            )
        end0 = slot_of_end.get((eid, 0))
        end1 = slot_of_end.get((eid, 1))
        if end0 is None or end1 is None:
            raise StructuralError("edge %r is missing an end" % (eid,))
        if len({a for a, _ in pairs}) != 3 or len({b for _, b in pairs}) != 3:
            raise StructuralError("edge %r wing pairs %r are not a bijection" % (eid, pairs))
        edges[eid] = EdgeRec(id=eid, ends=(end0, end1), wings=tuple(sorted(pairs)))

    vrecs = {}
    for vid, slots in vertex_slot_edges.items():
        vrecs[vid] = VertexRec(
            id=vid, slots=tuple(slots), complete=all(s is not None for s in slots)
        )
    return SpecialPolyhedron(vertices=vrecs, edges=edges)
