"""The infinite brick wall and presentation polyhedra built on it.

The wall is the 2-skeleton of a slab tessellated by 2x1x1 bricks in
running bond: front and back planes subdivided in the brick pattern
(hexagonal faces), vertical interface and joint squares between bricks.
All coordinates are quarter-integers scaled by 4, so geometry is exact.

Conventions (row r, all integers j):
* joints of row r sit at x = j with j = r (mod 2); brick k of row r spans
  x in [2k + (r mod 2), 2k + 2 + (r mod 2)];
* vertices V(j,r,z) at every integer point of both planes z in {0,1};
* edges: H(j,r,z) from V(j,r,z) to V(j+1,r,z); J(j,r,z) (only j = r mod 2)
  from V(j,r,z) up to V(j,r+1,z); Z(j,r) through the wall;
* slots at V(j,r,z): 0 west H, 1 east H, 2 the J edge (up or down),
  3 the Z edge.

A presentation complex attaches, per generator i, one 1-cell over the
marked points of bricks (2i, 2i+1) of row 0, and one 2-cell per relator
running along its letters' 1-cells and along right-angled arcs.  Arcs
leave a marked point through one of three channels (west/north/east),
climb the front plane to a lane row allocated by interval coloring, dive
through an interface square, run horizontally across the back plane, and
descend symmetrically.  Channels have globally distinct x, lanes with
overlapping spans get distinct rows, and the only dives into any given
interface square belong to a single arc, so arcs of distinct relators are
pairwise disjoint and all crossings are transversal arc/edge crossings
(legal vertices of a special polyhedron).
"""

from __future__ import annotations

from dataclasses import dataclass

from .polyhedron import (
    Decoration,
    EdgeRec,
    SpecialPolyhedron,
    StructuralError,
    VertexRec,
)

SCALE = 4

WINGS_H = ((0, 2), (2, 1), (3, 3))
WINGS_J = ((0, 0), (1, 1), (3, 3))
WINGS_Z = ((0, 0), (1, 1), (2, 2))


def vid(j, r, z):
    return "V;%d;%d;%d" % (j, r, z)


def hid(j, r, z):
    return "H;%d;%d;%d" % (j, r, z)


def jid(j, r, z):
    return "J;%d;%d;%d" % (j, r, z)


def zid(j, r):
    return "Z;%d;%d" % (j, r)


def parse_cell_id(cid):
    parts = cid.split(";")
    return parts[0], parts[1:]


def has_joint(j, r):
    return (j - r) % 2 == 0


def wall_vertex_record(j, r, z):
    if has_joint(j, r):
        jedge = (jid(j, r, z), 0)
    else:
        jedge = (jid(j, r - 1, z), 1)
    slots = (
        (hid(j - 1, r, z), 1),
        (hid(j, r, z), 0),
        jedge,
        (zid(j, r), 0 if z == 1 else 1),
    )
    return VertexRec(id=vid(j, r, z), slots=slots, complete=True)


def wall_edge_record(cid):
    kind, args = parse_cell_id(cid)
    if kind == "H":
        j, r, z = map(int, args)
        return EdgeRec(id=cid, ends=((vid(j, r, z), 1), (vid(j + 1, r, z), 0)), wings=WINGS_H)
    if kind == "J":
        j, r, z = map(int, args)
        if not has_joint(j, r):
            return None
        return EdgeRec(id=cid, ends=((vid(j, r, z), 2), (vid(j, r + 1, z), 2)), wings=WINGS_J)
    if kind == "Z":
        j, r = map(int, args)
        return EdgeRec(id=cid, ends=((vid(j, r, 1), 3), (vid(j, r, 0), 3)), wings=WINGS_Z)
    return None


# face keys: ("HEX", k, r, z), ("ISQ", j, r), ("JSQ", j, r)


def face_cycle(face):
    """Boundary as [(edge id, entered end), ...]."""
    kind = face[0]
    if kind == "HEX":
        _, k, r, z = face
        a = 2 * k + (r % 2)
        return [
            (hid(a, r, z), 0),
            (hid(a + 1, r, z), 0),
            (jid(a + 2, r, z), 0),
            (hid(a + 1, r + 1, z), 1),
            (hid(a, r + 1, z), 1),
            (jid(a, r, z), 1),
        ]
    if kind == "ISQ":
        _, j, r = face
        return [
            (hid(j, r, 1), 0),
            (zid(j + 1, r), 0),
            (hid(j, r, 0), 1),
            (zid(j, r), 1),
        ]
    if kind == "JSQ":
        _, j, r = face
        return [
            (jid(j, r, 1), 0),
            (zid(j, r + 1), 0),
            (jid(j, r, 0), 1),
            (zid(j, r), 1),
        ]
    raise ValueError(face)


def faces_of_wall_edge(cid):
    kind, args = parse_cell_id(cid)
    if kind == "H":
        j, r, z = map(int, args)
        k_above = (j - (r % 2)) // 2
        k_below = (j - ((r - 1) % 2)) // 2
        return [("HEX", k_above, r, z), ("HEX", k_below, r - 1, z), ("ISQ", j, r)]
    if kind == "J":
        j, r, z = map(int, args)
        k = (j - (r % 2)) // 2
        return [("HEX", k - 1, r, z), ("HEX", k, r, z), ("JSQ", j, r)]
    if kind == "Z":
        j, r = map(int, args)
        rq = r if has_joint(j, r) else r - 1
        return [("ISQ", j - 1, r), ("ISQ", j, r), ("JSQ", j, rq)]
    raise ValueError(cid)


def vertex_point(cid):
    """Scaled (x, y) of a vertex cell (z collapsed)."""
    kind, args = parse_cell_id(cid)
    if kind == "V":
        j, r, _ = map(int, args)
        return (SCALE * j, SCALE * r)
    raise ValueError(cid)


class PureWall:
    """Lazy generator for the undecorated infinite wall."""

    def vertex_record(self, cid):
        kind, args = parse_cell_id(cid)
        if kind != "V":
            return None
        j, r, z = map(int, args)
        if z not in (0, 1):
            return None
        return wall_vertex_record(j, r, z)

    def edge_record(self, cid):
        return wall_edge_record(cid)


def wall_polyhedron():
    return SpecialPolyhedron(generator=PureWall(), name="wall")


def build_wall(row_lo, row_hi, col_lo, col_hi):
    """Materialize the window of bricks rows [row_lo, row_hi] x columns
    [col_lo, col_hi] as a finite polyhedron (frontier marked incomplete)."""
    if row_hi < row_lo or col_hi < col_lo:
        raise ValueError("empty window")
    xs = range(2 * col_lo + 0, 2 * col_hi + 3)
    ys = range(row_lo, row_hi + 2)
    vertices = {}
    edges = {}
    for r in ys:
        for j in xs:
            for z in (0, 1):
                rec = wall_vertex_record(j, r, z)
                vertices[rec.id] = rec
    for r in ys:
        for j in xs:
            for z in (0, 1):
                for eid in (hid(j, r, z), jid(j, r, z)):
                    rec = wall_edge_record(eid)
                    if rec is None:
                        continue
                    if all(v in vertices for v, _ in rec.ends):
                        edges[eid] = rec
            rec = wall_edge_record(zid(j, r))
            if all(v in vertices for v, _ in rec.ends):
                edges[zid(j, r)] = rec
    out_vertices = {}
    for v, rec in vertices.items():
        complete = all(rec.slots[i][0] in edges for i in range(4))
        out_vertices[v] = VertexRec(id=v, slots=rec.slots, complete=complete)
    return SpecialPolyhedron(vertices=out_vertices, edges=edges, name="wall-window")


@dataclass(frozen=True)
class WallCoordinates:
    """Brick-indexed description of a wall cell."""

    row: int
    column: int
    layer_parity: int
    role: str  # top-hexagon | vertical-square | edge-segment | vertex

    @classmethod
    def of(cls, cid):
        kind, args = parse_cell_id(cid)
        if kind == "V":
            j, r, z = map(int, args)
            return cls(r, (j - (r % 2)) // 2, r % 2, "vertex")
        if kind in ("H", "J"):
            j, r, z = map(int, args)
            return cls(r, (j - (r % 2)) // 2, r % 2, "edge-segment")
        if kind == "Z":
            j, r = map(int, args)
            return cls(r, (j - (r % 2)) // 2, r % 2, "edge-segment")
        raise ValueError("not a wall cell: %r" % cid)


# ---------------------------------------------------------------------------
# arcs

DIR_E, DIR_N, DIR_W, DIR_S = 0, 1, 2, 3

CHANNEL_SLOTS = {"W": 0, "N": 1, "E": 2}


def _m_x(k):
    return 8 * k + 4


def _channel_path(mx, channel):
    """Path from the marked point to the channel head; the climb continues
    vertically above the last point."""
    if channel == "W":
        return [(mx, 2), (mx - 1, 2)]
    if channel == "N":
        return [(mx, 2), (mx, 3), (mx + 1, 3)]
    return [(mx, 2), (mx + 2, 2)]


@dataclass
class ArcSpec:
    relator: int
    index: int  # position within the relator's arc list
    m_start: int
    m_end: int
    chan_start: str = ""
    chan_end: str = ""
    lane: int = 0

    @property
    def key(self):
        return (self.relator, self.index)


def plan_arcs(np_pres):
    """Arc endpoints from the relator letters; channel and lane allocation.

    Returns (arcs, cell_letters) where cell_letters[t] lists
    (generator index, sign, entry m, exit m) per letter of relator t.
    """
    p = np_pres.presentation
    gen_index = {g: i for i, g in enumerate(p.generators)}
    arcs = []
    cell_letters = []
    for t, word in enumerate(p.relators):
        letters = []
        for sym, sign in word:
            gi = gen_index[sym]
            if sign > 0:
                entry, exit_ = 2 * gi, 2 * gi + 1
            else:
                entry, exit_ = 2 * gi + 1, 2 * gi
            letters.append((gi, sign, entry, exit_))
        cell_letters.append(letters)
        for a in range(len(letters)):
            nxt = letters[(a + 1) % len(letters)]
            arcs.append(ArcSpec(relator=t, index=a, m_start=letters[a][3], m_end=nxt[2]))

    ends_at = {}
    for arc in arcs:
        ends_at.setdefault(arc.m_start, []).append((arc.key, 0))
        ends_at.setdefault(arc.m_end, []).append((arc.key, 1))
    arc_by_key = {a.key: a for a in arcs}
    for m, ends in sorted(ends_at.items()):
        if len(ends) != 3:
            raise StructuralError(
                "marked point %d carries %d arc ends, expected 3 "
                "(is the presentation normalized?)" % (m, len(ends))
            )
        for channel, (key, which) in zip(("W", "N", "E"), sorted(ends)):
            if which == 0:
                arc_by_key[key].chan_start = channel
            else:
                arc_by_key[key].chan_end = channel

    # lanes by interval coloring: smallest row >= 2 clear of overlapping
    # spans (spans inflated so dives into interface squares stay apart)
    lanes = []
    for arc in arcs:
        xs = _channel_path(_m_x(arc.m_start), arc.chan_start)[-1][0]
        xe = _channel_path(_m_x(arc.m_end), arc.chan_end)[-1][0]
        span = (min(xs, xe) - 4, max(xs, xe) + 4)
        for lane, used in enumerate(lanes):
            if all(span[1] < lo or hi < span[0] for lo, hi in used):
                used.append(span)
                arc.lane = lane + 2
                break
        else:
            lanes.append([span])
            arc.lane = len(lanes) + 1
    return arcs, cell_letters


def _hex_of_point2(x2, y2, z):
    """Hexagon containing the (doubled-coordinate) interior point."""
    r = y2 // (2 * SCALE)
    k = (x2 - 2 * SCALE * (r % 2)) // (4 * SCALE)
    return ("HEX", int(k), int(r), z)


def _probe2(pts):
    """Doubled coordinates of the midpoint of the longest segment."""
    best = None
    for p, q in zip(pts, pts[1:]):
        ln = abs(q[0] - p[0]) + abs(q[1] - p[1])
        if best is None or ln > best[0]:
            best = (ln, p, q)
    _, p, q = best
    return (p[0] + q[0], p[1] + q[1])


def _crossings_on_segment(p, q, z):
    """Wall edges crossed strictly inside the open segment (front/back).

    Arc segments may lie on a grid line only where the wall has no cell
    there (e.g. the north jog at a non-joint x); running along an actual
    edge or through a vertex is a routing bug.
    """
    out = []
    if p[0] == q[0]:
        x = p[0]
        lo, hi = sorted((p[1], q[1]))
        if x % SCALE == 0:
            j = x // SCALE
            for y in range(lo, hi + 1):
                if y % SCALE == 0:
                    raise StructuralError("arc run through wall vertex at %r" % ((x, y),))
            for r in range(lo // SCALE, hi // SCALE + 1):
                if has_joint(j, r):
                    raise StructuralError("arc run along joint edge at x=%d row %d" % (x, r))
            return []
        j = x // SCALE
        for y in range(lo + 1, hi):
            if y % SCALE == 0:
                out.append((hid(j, y // SCALE, z), (x, y)))
        if p[1] > q[1]:
            out.reverse()
    else:
        y = p[1]
        if y % SCALE == 0:
            raise StructuralError("horizontal arc run along an H edge at y=%d" % y)
        r = y // SCALE
        lo, hi = sorted((p[0], q[0]))
        for x in range(lo + 1, hi):
            if x % SCALE == 0 and has_joint(x // SCALE, r):
                out.append((jid(x // SCALE, r, z), (x, y)))
        if p[0] > q[0]:
            out.reverse()
    return out


def _split_leg(pts, z, face_of_piece):
    """Split a front/back polyline at wall-edge crossings.

    Returns ([(face, piece_pts)], [(edge id, point)]) with one crossing
    between consecutive pieces.
    """
    pieces = []
    crossings = []
    cur = [pts[0]]
    for p, q in zip(pts, pts[1:]):
        if p == q:
            continue
        for eid, point in _crossings_on_segment(p, q, z):
            cur.append(point)
            pieces.append((face_of_piece(cur), cur))
            crossings.append((eid, point))
            cur = [point]
        cur.append(q)
    pieces.append((face_of_piece(cur), cur))
    return pieces, crossings


def arc_route(arc):
    """Nodes and pieces of the arc.

    Returns (nodes, pieces): nodes alternate with pieces along the arc;
    a node is "M;<k>" or ("X", wall edge id, point); a piece is a dict
    with the face key and the point list (face-local planar coordinates).
    """
    mxs, mxe = _m_x(arc.m_start), _m_x(arc.m_end)
    pre = _channel_path(mxs, arc.chan_start)
    post = _channel_path(mxe, arc.chan_end)
    yl = SCALE * arc.lane
    xa, xb = pre[-1][0], post[-1][0]
    ja, jb = xa // SCALE, xb // SCALE

    def front_face(pts):
        x2, y2 = _probe2(pts)
        return _hex_of_point2(x2, y2, 1)

    def back_face(pts):
        x2, y2 = _probe2(pts)
        return _hex_of_point2(x2, y2, 0)

    nodes = ["M;%d" % arc.m_start]
    pieces = []

    # front climb, ending on the edge H(ja, lane, 1)
    leg = pre + [(xa, yl)]
    ps, cs = _split_leg(leg, 1, front_face)
    for (face, ppts), crossing in zip(ps, cs + [None]):
        pieces.append({"face": face, "pts": ppts})
        if crossing is not None:
            nodes.append(("X", crossing[0], crossing[1]))
    nodes.append(("X", hid(ja, arc.lane, 1), (xa, yl)))

    # dive, back run, dive
    pieces.append({"face": ("ISQ", ja, arc.lane), "pts": [(xa, SCALE), (xa, 0)]})
    nodes.append(("X", hid(ja, arc.lane, 0), (xa, yl)))
    leg = [(xa, yl), (xa, yl + 2), (xb, yl + 2), (xb, yl)]
    ps, cs = _split_leg(leg, 0, back_face)
    for (face, ppts), crossing in zip(ps, cs + [None]):
        pieces.append({"face": face, "pts": ppts})
        if crossing is not None:
            nodes.append(("X", crossing[0], crossing[1]))
    nodes.append(("X", hid(jb, arc.lane, 0), (xb, yl)))
    pieces.append({"face": ("ISQ", jb, arc.lane), "pts": [(xb, 0), (xb, SCALE)]})
    nodes.append(("X", hid(jb, arc.lane, 1), (xb, yl)))

    # front descent
    leg = [(xb, yl)] + list(reversed(post))
    ps, cs = _split_leg(leg, 1, front_face)
    for (face, ppts), crossing in zip(ps, cs + [None]):
        pieces.append({"face": face, "pts": ppts})
        if crossing is not None:
            nodes.append(("X", crossing[0], crossing[1]))
    nodes.append("M;%d" % arc.m_end)

    assert len(nodes) == len(pieces) + 1
    return nodes, pieces


# ---------------------------------------------------------------------------
# planar region tracing inside one face


def trace_planar_regions(pedges):
    """Regions of a rectangle subdivided by disjoint interior polylines.

    ``pedges``: list of (pid, pts) with axis-parallel integer polylines;
    boundary and interior pieces together.  Returns interior region
    circuits as lists of (pid, enter_end) with enter_end=0 meaning the
    region traverses the polyline in its stored orientation.
    """
    nodes = {p for _, pts in pedges for p in pts}
    segs = []  # (p, q, pid)
    for pid, pts in pedges:
        for p, q in zip(pts, pts[1:]):
            if p == q:
                continue
            # split at foreign nodes lying in the open segment
            if p[0] == q[0]:
                inner = [u for u in nodes if u[0] == p[0] and min(p[1], q[1]) < u[1] < max(p[1], q[1])]
                inner.sort(key=lambda u: u[1], reverse=p[1] > q[1])
            else:
                inner = [u for u in nodes if u[1] == p[1] and min(p[0], q[0]) < u[0] < max(p[0], q[0])]
                inner.sort(key=lambda u: u[0], reverse=p[0] > q[0])
            run = [p] + inner + [q]
            for a, b in zip(run, run[1:]):
                segs.append((a, b, pid))
    outgoing = {}
    for si, (p, q, pid) in enumerate(segs):
        dpq = _seg_dir(p, q)
        outgoing.setdefault(p, {})[dpq] = (si, True)
        outgoing.setdefault(q, {})[(dpq + 2) % 4] = (si, False)

    visited = set()
    circuits = []
    for si in range(len(segs)):
        for fwd in (True, False):
            if (si, fwd) in visited:
                continue
            walk = []
            cur = (si, fwd)
            turning = 0
            while cur not in visited:
                visited.add(cur)
                walk.append(cur)
                p, q, pid = segs[cur[0]]
                tail = q if cur[1] else p
                d_in = _seg_dir(p, q) if cur[1] else _seg_dir(q, p)
                rev = (d_in + 2) % 4
                outs = outgoing[tail]
                for delta in (3, 2, 1, 0):
                    d_out = (rev + delta) % 4
                    if d_out in outs:
                        break
                else:
                    raise StructuralError("dead end in planar trace at %r" % (tail,))
                turn = ((d_out - d_in + 1) % 4) - 1
                turning += turn
                cur = outs[d_out]
            assert walk and cur == walk[0], "planar trace did not close"
            if turning > 0:
                circuits.append(walk)

    out = []
    for walk in circuits:
        entries = []
        for si, fwd in walk:
            pid = segs[si][2]
            enter = 0 if fwd else 1
            if entries and entries[-1] == (pid, enter):
                continue
            entries.append((pid, enter))
        if len(entries) > 1 and entries[0] == entries[-1]:
            entries.pop()
        out.append(entries)
    return out


def _seg_dir(p, q):
    if q[0] > p[0]:
        return DIR_E
    if q[0] < p[0]:
        return DIR_W
    if q[1] > p[1]:
        return DIR_N
    return DIR_S


# ---------------------------------------------------------------------------
# the presentation complex P(np): wall + 1-cells + relator 2-cells


def m_id(k):
    return "M;%d" % k


def one_cell_id(i):
    return "G;%d" % i


def arc_piece_id(key, i):
    return "A;%d;%d;%d" % (key[0], key[1], i)


def _param_on_edge(eid, point):
    kind, args = parse_cell_id(eid)
    if kind == "H":
        j = int(args[0])
        return point[0] - SCALE * j
    if kind == "J":
        r = int(args[1])
        return point[1] - SCALE * r
    raise StructuralError("arc crossing on unexpected edge %r" % eid)


def _local_pt(face, eid, point_or_vertex):
    """Map a global crossing point or a vertex id into face-local coords."""
    kind = face[0]
    if kind == "HEX":
        if isinstance(point_or_vertex, str):
            return vertex_point(point_or_vertex)
        return point_or_vertex
    if kind == "ISQ":
        if isinstance(point_or_vertex, str):
            _, args = parse_cell_id(point_or_vertex)
            j, r, z = map(int, args)
            return (SCALE * j, SCALE if z == 1 else 0)
        x, _ = point_or_vertex
        # the caller disambiguates front/back via the boundary edge id
        raise AssertionError("crossing points need _local_pt_edge")
    if kind == "JSQ":
        if isinstance(point_or_vertex, str):
            _, args = parse_cell_id(point_or_vertex)
            j, r, z = map(int, args)
            return (SCALE * r, SCALE if z == 1 else 0)
        raise AssertionError("crossing points need _local_pt_edge")
    raise ValueError(face)


def _local_pt_edge(face, eid, point):
    """Face-local coordinates of a crossing point lying on boundary edge eid."""
    kind = face[0]
    kinde, argse = parse_cell_id(eid)
    if kind == "HEX":
        return point
    if kind == "ISQ":
        z = int(argse[2])
        return (point[0], SCALE if z == 1 else 0)
    if kind == "JSQ":
        z = int(argse[2])
        return (point[1], SCALE if z == 1 else 0)
    raise ValueError(face)


class PresentationComplex(SpecialPolyhedron):
    """Lazy special polyhedron P(np): the wall with presentation cells.

    The finite patch (marked points, 1-cells, arcs, subdivided wall cells)
    is precomputed; everything else is generated by the wall formulas.
    """

    def __init__(self, np_pres, patch):
        super().__init__(generator=self, name="P(np)")
        self.normalized = np_pres
        self.patch_vertices = patch["vertices"]
        self.patch_edges = patch["edges"]
        self.removed_edges = patch["removed_edges"]
        self.coords = patch["coords"]
        self.one_cells = patch["one_cells"]  # [(edge id, generator symbol)]
        self.m_ids = patch["m_ids"]
        self.relator_circuits = patch["relator_circuits"]
        self.arcs = patch["arcs"]
        self.base_vertex = m_id(0)

    # generator protocol
    def vertex_record(self, cid):
        rec = self.patch_vertices.get(cid)
        if rec is not None:
            return rec
        kind, args = parse_cell_id(cid)
        if kind != "V":
            return None
        j, r, z = map(int, args)
        if z not in (0, 1):
            return None
        return wall_vertex_record(j, r, z)

    def edge_record(self, cid):
        rec = self.patch_edges.get(cid)
        if rec is not None:
            return rec
        if cid in self.removed_edges:
            return None
        return wall_edge_record(cid)

    def vertex_coord(self, vid):
        if vid in self.coords:
            return self.coords[vid]
        kind, args = parse_cell_id(vid)
        if kind == "V":
            j, r, _ = map(int, args)
            return (SCALE * j, SCALE * r)
        raise StructuralError("no coordinates for %r" % vid)

    def edge_shell(self, eid):
        rec = self.edge_record(eid)
        if rec is None:
            raise StructuralError("unknown edge %r" % eid)
        pts = [self.vertex_coord(v) for v, _ in rec.ends]
        return max(max(abs(x), abs(y)) for x, y in pts)

    def generator_of_one_cell(self, eid):
        for e, sym in self.one_cells:
            if e == eid:
                return sym
        return None


def attach_presentation_cells(np_pres):
    """Build the lazy presentation complex from a normalized presentation."""
    err = np_pres.verify_normal_form()
    if err is not None:
        raise StructuralError("presentation is not normalized: %s" % err)
    arcs, cell_letters = plan_arcs(np_pres)
    routes = {arc.key: arc_route(arc) for arc in arcs}
    arc_by_key = {a.key: a for a in arcs}
    gens = np_pres.presentation.generators
    n_gens = len(gens)
    m_count = 2 * n_gens

    # crossing registry; nodes must be globally distinct (disjoint arcs)
    crossings = {}
    seen_nodes = set()
    for key in sorted(routes):
        nodes, _ = routes[key]
        for node in nodes:
            if isinstance(node, tuple):
                _, eid, point = node
                if node in seen_nodes:
                    raise StructuralError("arc collision at %r" % (node,))
                seen_nodes.add(node)
                crossings.setdefault(eid, []).append((_param_on_edge(eid, point), point, node))
    xv_id = {}
    coords = {}
    for eid in sorted(crossings):
        lst = sorted(crossings[eid])
        params = [p for p, _, _ in lst]
        if len(set(params)) != len(params):
            raise StructuralError("coincident crossings on %r" % eid)
        crossings[eid] = lst
        for i, (_, point, node) in enumerate(lst):
            cid = "X;%s;%d" % (eid, i)
            xv_id[node] = cid
            coords[cid] = point

    # wall-edge pieces
    piece_ids = {}
    piece_ends = {}
    for eid, lst in crossings.items():
        rec = wall_edge_record(eid)
        ids = ["%s;P;%d" % (eid, i) for i in range(len(lst) + 1)]
        piece_ids[eid] = ids
        for i, pid in enumerate(ids):
            end0 = rec.ends[0] if i == 0 else (xv_id[lst[i - 1][2]], 1)
            end1 = rec.ends[1] if i == len(lst) else (xv_id[lst[i][2]], 0)
            piece_ends[pid] = (end0, end1)

    # arc pieces
    arc_piece_count = {}
    arc_piece_pts = {}
    arc_node_ids = {}
    for key in sorted(routes):
        nodes, pieces = routes[key]
        arc = arc_by_key[key]
        arc_piece_count[key] = len(pieces)
        node_ids = []
        for pos, node in enumerate(nodes):
            if isinstance(node, str):
                node_ids.append(node)
            else:
                node_ids.append(xv_id[node])
        arc_node_ids[key] = node_ids
        for i, piece in enumerate(pieces):
            arc_piece_pts[arc_piece_id(key, i)] = piece
    for key in sorted(routes):
        arc = arc_by_key[key]
        node_ids = arc_node_ids[key]
        n_p = arc_piece_count[key]
        for i in range(n_p):
            pid = arc_piece_id(key, i)
            n0, n1 = node_ids[i], node_ids[i + 1]
            if n0.startswith("M;"):
                end0 = (n0, CHANNEL_SLOTS[arc.chan_start])
            else:
                end0 = (n0, 3)  # outgoing arc slot at a crossing vertex
            if n1.startswith("M;"):
                end1 = (n1, CHANNEL_SLOTS[arc.chan_end])
            else:
                end1 = (n1, 2)  # incoming arc slot
            piece_ends[pid] = (end0, end1)

    # 1-cells
    one_cells = []
    for i, sym in enumerate(gens):
        piece_ends[one_cell_id(i)] = ((m_id(2 * i), 3), (m_id(2 * i + 1), 3))
        one_cells.append((one_cell_id(i), sym))

    # vertex records: crossings
    patch_vertices = {}
    for eid, lst in crossings.items():
        ids = piece_ids[eid]
        for i, (_, point, node) in enumerate(lst):
            cid = xv_id[node]
            # locate the arc pieces meeting this node
            key, pos = _node_position(arc_node_ids, cid)
            arc_in = arc_piece_id(key, pos - 1)
            arc_out = arc_piece_id(key, pos)
            slots = ((ids[i], 1), (ids[i + 1], 0), (arc_in, 1), (arc_out, 0))
            patch_vertices[cid] = VertexRec(id=cid, slots=slots, complete=True)

    # vertex records: marked points
    m_channel_piece = {}
    for key in sorted(routes):
        arc = arc_by_key[key]
        node_ids = arc_node_ids[key]
        m_channel_piece[(node_ids[0], arc.chan_start)] = (arc_piece_id(key, 0), 0)
        m_channel_piece[(node_ids[-1], arc.chan_end)] = (
            arc_piece_id(key, arc_piece_count[key] - 1),
            1,
        )
    m_ids = []
    for k in range(m_count):
        cid = m_id(k)
        m_ids.append(cid)
        coords[cid] = (_m_x(k), 2)
        slots = (
            m_channel_piece[(cid, "W")],
            m_channel_piece[(cid, "N")],
            m_channel_piece[(cid, "E")],
            (one_cell_id(k // 2), 0 if k % 2 == 0 else 1),
        )
        patch_vertices[cid] = VertexRec(id=cid, slots=slots, complete=True)

    # vertex overrides at the wall endpoints of subdivided edges
    overrides = {}
    for eid, lst in crossings.items():
        rec = wall_edge_record(eid)
        ids = piece_ids[eid]
        for (v, s), pid, end in ((rec.ends[0], ids[0], 0), (rec.ends[1], ids[-1], 1)):
            overrides.setdefault(v, {})[s] = (pid, end)
    for v, slot_over in overrides.items():
        kind, args = parse_cell_id(v)
        j, r, z = map(int, args)
        base = wall_vertex_record(j, r, z)
        slots = tuple(slot_over.get(i, base.slots[i]) for i in range(4))
        patch_vertices[v] = VertexRec(id=v, slots=slots, complete=True)

    # ---- face circuits ----
    circuits = []
    # relator 2-cells
    relator_circuits = []
    for t, letters in enumerate(cell_letters):
        cyc = []
        for a, (gi, sign, entry, exit_) in enumerate(letters):
            cyc.append((one_cell_id(gi), 0 if sign > 0 else 1))
            key = (t, a)
            for i in range(arc_piece_count[key]):
                cyc.append((arc_piece_id(key, i), 0))
        circuits.append(cyc)
        relator_circuits.append(cyc)

    # faces entered by arcs
    entered = {}
    for key in sorted(routes):
        _, pieces = routes[key]
        for i, piece in enumerate(pieces):
            entered.setdefault(piece["face"], []).append(
                (arc_piece_id(key, i), piece["pts"])
            )
    # faces affected through a subdivided boundary edge
    affected = set()
    for eid in crossings:
        affected.update(faces_of_wall_edge(eid))

    def boundary_pedges(face):
        out = []
        for eid, enter in face_cycle(face):
            rec = wall_edge_record(eid)
            if eid in piece_ids:
                lst = crossings[eid]
                pts = [_local_pt(face, eid, rec.ends[0][0])]
                pts += [_local_pt_edge(face, eid, point) for _, point, _ in lst]
                pts.append(_local_pt(face, eid, rec.ends[1][0]))
                ids = piece_ids[eid]
                runs = list(zip(ids, zip(pts, pts[1:])))
                if enter == 1:
                    runs.reverse()
                for pid, (a, b) in runs:
                    out.append((pid, [a, b], enter))
            else:
                a = _local_pt(face, eid, rec.ends[0][0])
                b = _local_pt(face, eid, rec.ends[1][0])
                out.append((eid, [a, b], enter))
        return out

    for face in sorted(set(entered) | affected, key=repr):
        boundary = boundary_pedges(face)
        if face in entered:
            pedges = [(pid, pts) for pid, pts, _ in boundary]
            pedges += entered[face]
            for reg in trace_planar_regions(pedges):
                circuits.append(reg)
        else:
            circuits.append([(pid, enter) for pid, pts, enter in boundary])

    # ---- wings from circuits ----
    patch_edge_ids = set(piece_ends)

    def slot_of_end(eid, end):
        ends = piece_ends.get(eid)
        if ends is None:
            ends = wall_edge_record(eid).ends
        return ends[end]

    pair_lists = {}
    for cyc in circuits:
        n = len(cyc)
        for k, (eid, enter) in enumerate(cyc):
            if eid not in patch_edge_ids:
                continue
            prev_e, prev_enter = cyc[(k - 1) % n]
            next_e, next_enter = cyc[(k + 1) % n]
            v_prev, slot_prev = slot_of_end(prev_e, 1 - prev_enter)
            v_in, _ = slot_of_end(eid, enter)
            v_out, _ = slot_of_end(eid, 1 - enter)
            v_next, slot_next = slot_of_end(next_e, next_enter)
            if v_prev != v_in or v_out != v_next:
                raise StructuralError(
                    "broken circuit at %r (%r -> %r, %r -> %r)"
                    % (eid, v_prev, v_in, v_out, v_next)
                )
            pair = (slot_prev, slot_next) if enter == 0 else (slot_next, slot_prev)
            pair_lists.setdefault(eid, []).append(pair)

    patch_edges = {}
    for eid in sorted(patch_edge_ids):
        pairs = pair_lists.get(eid, [])
        if len(pairs) != 3:
            raise StructuralError(
                "edge %r carries %d face strips, expected 3" % (eid, len(pairs))
            )
        if len({a for a, _ in pairs}) != 3 or len({b for _, b in pairs}) != 3:
            raise StructuralError("edge %r wing pairs %r not a bijection" % (eid, pairs))
        patch_edges[eid] = EdgeRec(id=eid, ends=piece_ends[eid], wings=tuple(sorted(pairs)))

    patch = {
        "vertices": patch_vertices,
        "edges": patch_edges,
        "removed_edges": set(crossings),
        "coords": coords,
        "one_cells": one_cells,
        "m_ids": m_ids,
        "relator_circuits": relator_circuits,
        "arcs": arcs,
    }
    return PresentationComplex(np_pres, patch)


def _node_position(arc_node_ids, cid):
    for key, node_ids in arc_node_ids.items():
        for pos, nid in enumerate(node_ids):
            if nid == cid:
                return key, pos
    raise StructuralError("crossing %r not on any arc" % cid)


# ---------------------------------------------------------------------------
# canonical decoration


class ShellDecoration(Decoration):
    """c(e_i) = i + 4 under the canonical edge enumeration.

    Edges are enumerated shell by shell (max absolute scaled coordinate of
    their endpoints), ties broken by id; each shell is finite, so the
    enumeration is a computable bijection onto the naturals and injective
    decorations come out deterministic and reproducible.
    """

    def __init__(self, complex_):
        super().__init__(values=None, fn=self._value)
        self.complex = complex_
        self._index = {}
        self._max_shell = -1
        self._patch_by_shell = {}
        for eid in sorted(complex_.patch_edges):
            self._patch_by_shell.setdefault(complex_.edge_shell(eid), []).append(eid)

    def _extend(self, shell):
        while self._max_shell < shell:
            s = self._max_shell + 1
            ids = list(self._patch_by_shell.get(s, []))
            ids.extend(self._wall_edges_of_shell(s))
            for eid in sorted(set(ids)):
                self._index[eid] = len(self._index)
            self._max_shell = s

    def _wall_edges_of_shell(self, s):
        out = []
        removed = self.complex.removed_edges
        if s % SCALE == 0:
            g = s // SCALE
            rng = range(-g, g + 1)
            for z in (0, 1):
                for j in rng:
                    for r in rng:
                        if max(abs(j), abs(j + 1), abs(r)) * SCALE == s:
                            out.append(hid(j, r, z))
                        if has_joint(j, r) and max(abs(j), abs(r), abs(r + 1)) * SCALE == s:
                            out.append(jid(j, r, z))
            for j in rng:
                for r in rng:
                    if max(abs(j), abs(r)) * SCALE == s:
                        out.append(zid(j, r))
        return [e for e in out if e not in removed]

    def _value(self, eid):
        if eid not in self._index:
            shell = self.complex.edge_shell(eid)
            self._extend(shell)
            if eid not in self._index:
                raise KeyError("edge %r is not decorated" % eid)
        return 4 + self._index[eid]


def default_decoration(complex_):
    """The injective decoration c(e_i) = i + 4 of a presentation complex."""
    return ShellDecoration(complex_)
