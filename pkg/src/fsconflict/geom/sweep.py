"""Plane-sweep polygon boolean operations (Martinez-Rueda-Feito family).

Edges of both operands are fed to a left-to-right sweep. Each edge learns,
from the edge directly below it on the sweep line, whether its own polygon
is inside just above it and whether it lies inside the other operand.
Crossing and overlapping edges are split as the sweep discovers them, so
every surviving edge is either wholly inside or wholly outside the other
operand. Result edges are then directed with the result interior on their
left, chained into rings and nested into polygons.

Fill rule is even-odd, which makes touching parts of one operand (shared
edges) behave as a single region.
"""
from __future__ import annotations

import heapq
import math
from collections import Counter, defaultdict
from enum import IntEnum

from .shapes import EPS, Coord, MultiPolygon, Polygon, Ring, _shoelace, as_multi, point_in_ring

# rings whose |area| falls below this are treated as degenerate output
AREA_EPS = 1e-16

SUBJECT, CLIPPING = 0, 1
NORMAL, NON_CONTRIBUTING, SAME_TRANSITION, DIFFERENT_TRANSITION = range(4)


class Op(IntEnum):
    INTERSECTION = 0
    UNION = 1
    DIFFERENCE = 2
    XOR = 3


def _signed_area(p0, p1, p2):
    return (p0[0] - p2[0]) * (p1[1] - p2[1]) - (p1[0] - p2[0]) * (p0[1] - p2[1])


class _Event:
    __slots__ = (
        "pt", "left", "other", "poly", "contour", "seq", "etype",
        "in_out", "other_in_out", "in_result",
    )

    def __init__(self, pt, left, other, poly, contour, seq):
        self.pt = pt
        self.left = left
        self.other = other
        self.poly = poly
        self.contour = contour
        self.seq = seq
        self.etype = NORMAL
        self.in_out = False
        self.other_in_out = False
        self.in_result = False

    def __lt__(self, other):
        return _compare_events(self, other) < 0

    def is_below(self, p) -> bool:
        if self.left:
            return _signed_area(self.pt, self.other.pt, p) > 0
        return _signed_area(self.other.pt, self.pt, p) > 0

    def is_vertical(self) -> bool:
        return self.pt[0] == self.other.pt[0]

    def __repr__(self):
        return f"<{'L' if self.left else 'R'} {self.pt}->{self.other.pt if self.other else None} p{self.poly}>"


def _compare_events(e1: _Event, e2: _Event) -> int:
    """1 when e1 is processed after e2."""
    p1, p2 = e1.pt, e2.pt
    if p1[0] != p2[0]:
        return 1 if p1[0] > p2[0] else -1
    if p1[1] != p2[1]:
        return 1 if p1[1] > p2[1] else -1
    if e1.left != e2.left:
        # right endpoints first at a shared point
        return 1 if e1.left else -1
    if _signed_area(p1, e1.other.pt, e2.other.pt) != 0:
        return -1 if e1.is_below(e2.other.pt) else 1
    if e1.poly != e2.poly:
        return 1 if e1.poly > e2.poly else -1
    if e1.seq == e2.seq:
        return 0
    return 1 if e1.seq > e2.seq else -1


def _compare_segments(le1: _Event, le2: _Event) -> int:
    """Vertical order of two left events on the sweep line; -1 if le1 is below."""
    if le1 is le2:
        return 0
    a, b = le1.pt, le1.other.pt
    if _signed_area(a, b, le2.pt) != 0 or _signed_area(a, b, le2.other.pt) != 0:
        if a == le2.pt:
            return -1 if le1.is_below(le2.other.pt) else 1
        if a[0] == le2.pt[0]:
            return -1 if a[1] < le2.pt[1] else 1
        if _compare_events(le1, le2) == 1:
            # le1 was inserted after le2
            return -1 if not le2.is_below(le1.pt) else 1
        return -1 if le1.is_below(le2.pt) else 1
    # collinear
    if le1.poly == le2.poly:
        if a == le2.pt:
            if b == le2.other.pt:
                if le1.contour != le2.contour:
                    return 1 if le1.contour > le2.contour else -1
                return 1 if le1.seq > le2.seq else -1
            return 1 if le1.contour > le2.contour or (
                le1.contour == le2.contour and le1.seq > le2.seq) else -1
    else:
        return -1 if le1.poly == SUBJECT else 1
    return 1 if _compare_events(le1, le2) == 1 else -1


class _Snapper:
    """Reuses previously seen points within EPS so equal points compare equal."""

    def __init__(self):
        self._grid: dict[tuple[int, int], list[Coord]] = defaultdict(list)

    def add(self, p: Coord) -> Coord:
        gx, gy = math.floor(p[0] / EPS), math.floor(p[1] / EPS)
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for q in self._grid.get((gx + dx, gy + dy), ()):
                    if abs(q[0] - p[0]) <= EPS and abs(q[1] - p[1]) <= EPS:
                        return q
        self._grid[(gx, gy)].append(p)
        return p


def _close(p, q) -> bool:
    return abs(p[0] - q[0]) <= EPS and abs(p[1] - q[1]) <= EPS


def _segment_intersection(a1, a2, b1, b2):
    """Intersection of two closed segments.

    Returns () when disjoint, (p,) for a single point and (p, q) for a
    collinear overlap. Points within EPS of an endpoint are returned as that
    endpoint exactly.
    """
    vax, vay = a2[0] - a1[0], a2[1] - a1[1]
    vbx, vby = b2[0] - b1[0], b2[1] - b1[1]
    ex, ey = b1[0] - a1[0], b1[1] - a1[1]
    la2 = vax * vax + vay * vay
    lb2 = vbx * vbx + vby * vby
    la, lb = math.sqrt(la2), math.sqrt(lb2)
    kross = vax * vby - vay * vbx
    # distances of b's endpoints from a's supporting line
    db1 = abs(ex * vay - ey * vax) / la
    db2 = abs((b2[0] - a1[0]) * vay - (b2[1] - a1[1]) * vax) / la
    if db1 <= EPS and db2 <= EPS:
        return _collinear_overlap(a1, a2, b1, b2, vax, vay, la2, la)
    if kross == 0.0 or abs(kross) <= 1e-15 * la * lb:
        return ()
    s = (ex * vby - ey * vbx) / kross
    t = (ex * vay - ey * vax) / kross
    sa, tb = EPS / la, EPS / lb
    if s < -sa or s > 1 + sa or t < -tb or t > 1 + tb:
        return ()
    for q in (a1, a2, b1, b2):
        p = (a1[0] + s * vax, a1[1] + s * vay)
        if _close(p, q):
            return (q,)
    s = min(max(s, 0.0), 1.0)
    return ((a1[0] + s * vax, a1[1] + s * vay),)


def _collinear_overlap(a1, a2, b1, b2, vax, vay, la2, la):
    s1 = ((b1[0] - a1[0]) * vax + (b1[1] - a1[1]) * vay) / la2
    s2 = ((b2[0] - a1[0]) * vax + (b2[1] - a1[1]) * vay) / la2
    if s1 <= s2:
        lo, plo, hi, phi = s1, b1, s2, b2
    else:
        lo, plo, hi, phi = s2, b2, s1, b1
    tol = EPS / la
    if hi < -tol or lo > 1 + tol:
        return ()
    start = plo if lo > tol else a1
    end = phi if hi < 1 - tol else a2
    if _close(start, end):
        return (start,)
    return (start, end)


class _Sweep:
    def __init__(self, op: Op):
        self.op = op
        self.queue: list[_Event] = []
        self.seq = 0
        self.snap = _Snapper()

    def _new(self, pt, left, other, poly, contour):
        self.seq += 1
        return _Event(pt, left, other, poly, contour, self.seq)

    def add_ring(self, coords, poly, contour):
        pts = [self.snap.add((float(x), float(y))) for x, y in coords]
        for i in range(len(pts) - 1):
            p, q = pts[i], pts[i + 1]
            if p == q:
                continue
            e1 = self._new(p, True, None, poly, contour)
            e2 = self._new(q, True, e1, poly, contour)
            e1.other = e2
            if (p[0], p[1]) < (q[0], q[1]):
                e2.left = False
            else:
                e1.left = False
            heapq.heappush(self.queue, e1)
            heapq.heappush(self.queue, e2)

    # -- field computation -------------------------------------------------

    def _in_result(self, ev: _Event) -> bool:
        t = ev.etype
        op = self.op
        if t == NORMAL:
            if op == Op.INTERSECTION:
                return not ev.other_in_out
            if op == Op.UNION:
                return ev.other_in_out
            if op == Op.DIFFERENCE:
                return ev.other_in_out if ev.poly == SUBJECT else not ev.other_in_out
            return True
        if t == SAME_TRANSITION:
            return op in (Op.INTERSECTION, Op.UNION)
        if t == DIFFERENT_TRANSITION:
            return op == Op.DIFFERENCE
        return False

    def _compute_fields(self, ev: _Event, prev: _Event | None):
        if prev is None:
            ev.in_out = False
            ev.other_in_out = True
        elif ev.poly == prev.poly:
            ev.in_out = not prev.in_out
            ev.other_in_out = prev.other_in_out
        else:
            ev.in_out = not prev.other_in_out
            ev.other_in_out = (not prev.in_out) if prev.is_vertical() else prev.in_out
        ev.in_result = self._in_result(ev)

    # -- subdivision -------------------------------------------------------

    def _divide(self, se: _Event, p):
        if p == se.pt or p == se.other.pt:
            return
        r = self._new(p, False, se, se.poly, se.contour)
        l = self._new(p, True, se.other, se.poly, se.contour)
        if _compare_events(l, se.other) > 0:
            # rounding put the split point past the right endpoint
            se.other.left = True
            l.left = False
        se.other.other = l
        se.other = r
        heapq.heappush(self.queue, l)
        heapq.heappush(self.queue, r)

    def _possible_intersection(self, se1: _Event, se2: _Event) -> int:
        inter = _segment_intersection(se1.pt, se1.other.pt, se2.pt, se2.other.pt)
        if not inter:
            return 0
        n = len(inter)
        if n == 1:
            p = self.snap.add(inter[0])
            if se1.pt == se2.pt or se1.other.pt == se2.other.pt:
                return 0
            if p != se1.pt and p != se1.other.pt:
                self._divide(se1, p)
            if p != se2.pt and p != se2.other.pt:
                self._divide(se2, p)
            return 1
        # collinear overlap; same-polygon overlaps are split too so the
        # pieces become identical and order consistently
        same = se1.poly == se2.poly
        events = []
        left_co = se1.pt == se2.pt
        right_co = se1.other.pt == se2.other.pt
        if not left_co:
            events += [se2, se1] if _compare_events(se1, se2) == 1 else [se1, se2]
        if not right_co:
            o1, o2 = se1.other, se2.other
            events += [o2, o1] if _compare_events(o1, o2) == 1 else [o1, o2]
        if left_co:
            if not same:
                se2.etype = NON_CONTRIBUTING
                se1.etype = SAME_TRANSITION if se2.in_out == se1.in_out else DIFFERENT_TRANSITION
            if not right_co:
                self._divide(events[1].other, events[0].pt)
            return 2
        if right_co:
            self._divide(events[0], events[1].pt)
            return 3
        if events[0] is not events[3].other:
            self._divide(events[0], events[1].pt)
            self._divide(events[1], events[2].pt)
            return 3
        self._divide(events[0], events[1].pt)
        self._divide(events[3].other, events[2].pt)
        return 3

    # -- status line -------------------------------------------------------

    @staticmethod
    def _insert(sl: list[_Event], ev: _Event) -> int:
        lo, hi = 0, len(sl)
        while lo < hi:
            mid = (lo + hi) // 2
            if _compare_segments(ev, sl[mid]) < 0:
                hi = mid
            else:
                lo = mid + 1
        sl.insert(lo, ev)
        return lo

    def run(self, rightbound: float) -> list[_Event]:
        sl: list[_Event] = []
        done: list[_Event] = []
        queue = self.queue
        while queue:
            ev = heapq.heappop(queue)
            if ev.pt[0] > rightbound:
                break
            if ev.left:
                pos = self._insert(sl, ev)
                prev = sl[pos - 1] if pos > 0 else None
                nxt = sl[pos + 1] if pos + 1 < len(sl) else None
                self._compute_fields(ev, prev)
                if nxt is not None and self._possible_intersection(ev, nxt) == 2:
                    self._compute_fields(ev, prev)
                    self._compute_fields(nxt, ev)
                if prev is not None and self._possible_intersection(prev, ev) == 2:
                    ppos = sl.index(prev)
                    pprev = sl[ppos - 1] if ppos > 0 else None
                    self._compute_fields(prev, pprev)
                    self._compute_fields(ev, prev)
                if (nxt is not None and nxt.other.pt == ev.pt) or (
                    prev is not None and prev.other.pt == ev.pt
                ):
                    # a neighbour was split at our start point; its left piece
                    # ends here, so classify again once that piece is gone
                    sl.remove(ev)
                    heapq.heappush(queue, ev)
                    continue
                done.append(ev)
            else:
                le = ev.other
                try:
                    pos = sl.index(le)
                except ValueError:
                    continue
                prev = sl[pos - 1] if pos > 0 else None
                nxt = sl[pos + 1] if pos + 1 < len(sl) else None
                del sl[pos]
                if prev is not None and nxt is not None:
                    self._possible_intersection(prev, nxt)
        return done

    def result_edges(self, done: list[_Event]) -> list[tuple[Coord, Coord]]:
        edges = []
        op = self.op
        for ev in done:
            if not ev.in_result:
                continue
            a, b = ev.pt, ev.other.pt
            if a == b:
                continue
            flip = False
            if op == Op.DIFFERENCE and ev.poly == CLIPPING:
                flip = True
            elif op == Op.XOR and ev.etype == NORMAL and not ev.other_in_out:
                flip = True
            interior_above = (not ev.in_out) != flip
            edges.append((a, b) if interior_above else (b, a))
        return edges


# -- ring assembly -----------------------------------------------------------

def _turn_key(prev_pt, cur, nxt):
    """Counter-clockwise turn angle from the incoming direction, in (-pi, pi]."""
    ax, ay = cur[0] - prev_pt[0], cur[1] - prev_pt[1]
    bx, by = nxt[0] - cur[0], nxt[1] - cur[1]
    ang = math.atan2(ax * by - ay * bx, ax * bx + ay * by)
    return ang


def _split_simple(walk: list[Coord]) -> list[list[Coord]]:
    """Split a closed vertex walk (first != last) at repeated vertices."""
    out = []
    stack: list[Coord] = []
    where: dict[Coord, int] = {}
    for v in walk + [walk[0]]:
        if v in where:
            i = where[v]
            cyc = stack[i:]
            for u in cyc[1:]:
                del where[u]
            del stack[i + 1:]
            if len(cyc) >= 3:
                out.append(cyc)
        else:
            where[v] = len(stack)
            stack.append(v)
    return out


def _drop_collinear(ring: list[Coord]) -> list[Coord]:
    changed = True
    pts = ring
    while changed and len(pts) > 3:
        changed = False
        keep = []
        n = len(pts)
        for i in range(n):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
            if _signed_area(a, b, c) == 0.0:
                changed = True
                continue
            keep.append(b)
        if len(keep) < 3:
            return keep
        pts = keep
    return pts


def assemble(edges: list[tuple[Coord, Coord]]) -> MultiPolygon:
    """Chain directed edges (interior on the left) into a MultiPolygon."""
    count = Counter(edges)
    for (a, b), k in list(count.items()):
        if k and count.get((b, a), 0):
            m = min(k, count[(b, a)])
            count[(a, b)] -= m
            count[(b, a)] -= m
    outgoing: dict[Coord, list[Coord]] = defaultdict(list)
    for (a, b), k in sorted(count.items()):
        for _ in range(k):
            outgoing[a].append(b)

    rings: list[list[Coord]] = []
    for start in sorted(outgoing):
        while outgoing[start]:
            walk = [start]
            prev, cur = start, outgoing[start].pop()
            while cur != start:
                walk.append(cur)
                cands = outgoing.get(cur)
                if not cands:
                    walk = []
                    break
                if len(cands) == 1:
                    nxt = cands.pop()
                else:
                    best = max(range(len(cands)), key=lambda i: _turn_key(prev, cur, cands[i]))
                    nxt = cands.pop(best)
                prev, cur = cur, nxt
            if len(walk) >= 3:
                rings.extend(_split_simple(walk))

    outers: list[tuple[float, list[Coord]]] = []
    holes: list[tuple[float, list[Coord]]] = []
    for r in rings:
        r = _drop_collinear(r)
        if len(r) < 3:
            continue
        closed = r + [r[0]]
        a = _shoelace(closed)
        if abs(a) <= AREA_EPS:
            continue
        (outers if a > 0 else holes).append((a, closed))

    outers.sort(key=lambda t: t[0])
    bboxes = [_bbox(c) for _, c in outers]
    assigned: list[list[list[Coord]]] = [[] for _ in outers]
    for _, hc in holes:
        hb = _bbox(hc)
        for i, (_, oc) in enumerate(outers):
            ob = bboxes[i]
            if hb[0] < ob[0] - EPS or hb[1] < ob[1] - EPS or hb[2] > ob[2] + EPS or hb[3] > ob[3] + EPS:
                continue
            if _ring_inside(hc, oc):
                assigned[i].append(hc)
                break
    parts = []
    for (_, oc), hs in zip(outers, assigned):
        parts.append(Polygon(Ring(tuple(oc)), tuple(Ring(tuple(h)) for h in hs)))
    parts.sort(key=lambda p: p.outer.coords[0])
    return MultiPolygon(tuple(parts))


def _bbox(coords):
    xs = [c[0] for c in coords]
    ys = [c[1] for c in coords]
    return min(xs), min(ys), max(xs), max(ys)


def _ring_inside(inner: list[Coord], outer: list[Coord]) -> bool:
    for i in range(len(inner) - 1):
        a, b = inner[i], inner[i + 1]
        mid = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
        for probe in (a, mid):
            r = point_in_ring(probe, outer)
            if r != 0:
                return r > 0
    return False


# -- public entry --------------------------------------------------------------

def _bbox_of(m: MultiPolygon):
    return m.bbox()


def boolean(a: Polygon | MultiPolygon, b: Polygon | MultiPolygon, op: Op) -> MultiPolygon:
    a, b = as_multi(a), as_multi(b)
    ba, bb = _bbox_of(a), _bbox_of(b)
    if ba is None or bb is None:
        if op == Op.INTERSECTION:
            return MultiPolygon(())
        if op == Op.DIFFERENCE:
            return a if bb is None else MultiPolygon(())
        return b if ba is None else a
    disjoint = ba[2] < bb[0] or bb[2] < ba[0] or ba[3] < bb[1] or bb[3] < ba[1]
    if disjoint:
        if op == Op.INTERSECTION:
            return MultiPolygon(())
        if op == Op.DIFFERENCE:
            return a
        return MultiPolygon(a.parts + b.parts)

    sweep = _Sweep(op)
    contour = 0
    for poly_id, m in ((SUBJECT, a), (CLIPPING, b)):
        for p in m.parts:
            for r in p.rings():
                contour += 1
                sweep.add_ring(r.coords, poly_id, contour)
    if op == Op.INTERSECTION:
        rightbound = min(ba[2], bb[2])
    elif op == Op.DIFFERENCE:
        rightbound = ba[2]
    else:
        rightbound = math.inf
    done = sweep.run(rightbound)
    return assemble(sweep.result_edges(done))


def intersect(a: Polygon | MultiPolygon, b: Polygon | MultiPolygon) -> MultiPolygon:
    return boolean(a, b, Op.INTERSECTION)


def union(a: Polygon | MultiPolygon, b: Polygon | MultiPolygon) -> MultiPolygon:
    return boolean(a, b, Op.UNION)


def difference(a: Polygon | MultiPolygon, b: Polygon | MultiPolygon) -> MultiPolygon:
    return boolean(a, b, Op.DIFFERENCE)


def dissolve(parts) -> MultiPolygon:
    """Union of many polygons, merged pairwise in a balanced tree."""
    items = [as_multi(p) for p in parts]
    if not items:
        return MultiPolygon(())
    if len(items) == 1:
        return _self_union(items[0])
    while len(items) > 1:
        nxt = []
        for i in range(0, len(items) - 1, 2):
            nxt.append(union(items[i], items[i + 1]))
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return items[0]


def _self_union(m: MultiPolygon) -> MultiPolygon:
    # run the parts through the sweep once so touching parts merge
    if m.is_empty:
        return m
    sweep = _Sweep(Op.UNION)
    contour = 0
    for p in m.parts:
        for r in p.rings():
            contour += 1
            sweep.add_ring(r.coords, SUBJECT, contour)
    return assemble(sweep.result_edges(sweep.run(math.inf)))
