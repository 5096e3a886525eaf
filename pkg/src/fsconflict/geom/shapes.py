"""Planar polygon types and area computations in lon/lat degree space.

Areas are plain shoelace areas over raw degrees (square degrees). No
projection is applied, so a square degree near the equator and one near
the poles count the same. The sliver threshold used by the overlay step is
expressed in the same unit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Coord = tuple[float, float]

# absolute vertex snapping tolerance, degrees
EPS = 1e-9


class GeometryError(ValueError):
    pass


class InvalidRing(GeometryError):
    pass


class InvalidPolygon(GeometryError):
    pass


@dataclass(frozen=True)
class Ring:
    """Closed ring of (lon, lat) coordinates, first == last."""

    coords: tuple[Coord, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple((float(x), float(y)) for x, y in self.coords))

    @classmethod
    def closed(cls, pts: Iterable[Sequence[float]]) -> "Ring":
        pts = [(float(p[0]), float(p[1])) for p in pts]
        if pts and pts[0] != pts[-1]:
            pts.append(pts[0])
        return cls(tuple(pts))

    @property
    def open_coords(self) -> tuple[Coord, ...]:
        return self.coords[:-1]

    def reversed(self) -> "Ring":
        return Ring(self.coords[::-1])

    def bbox(self) -> tuple[float, float, float, float]:
        xs = [c[0] for c in self.coords]
        ys = [c[1] for c in self.coords]
        return min(xs), min(ys), max(xs), max(ys)


@dataclass(frozen=True)
class Polygon:
    outer: Ring
    holes: tuple[Ring, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "holes", tuple(self.holes))

    def rings(self) -> tuple[Ring, ...]:
        return (self.outer,) + self.holes

    def bbox(self) -> tuple[float, float, float, float]:
        return self.outer.bbox()


@dataclass(frozen=True)
class MultiPolygon:
    parts: tuple[Polygon, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    @property
    def is_empty(self) -> bool:
        return not self.parts

    def bbox(self) -> tuple[float, float, float, float] | None:
        if not self.parts:
            return None
        boxes = [p.bbox() for p in self.parts]
        return (
            min(b[0] for b in boxes),
            min(b[1] for b in boxes),
            max(b[2] for b in boxes),
            max(b[3] for b in boxes),
        )


def rect(x0: float, y0: float, x1: float, y1: float) -> Polygon:
    """Axis-aligned rectangle, counter-clockwise."""
    return Polygon(Ring.closed([(x0, y0), (x1, y0), (x1, y1), (x0, y1)]))


def as_multi(g: Polygon | MultiPolygon) -> MultiPolygon:
    if isinstance(g, MultiPolygon):
        return g
    if isinstance(g, Polygon):
        return MultiPolygon((g,))
    raise TypeError(f"expected Polygon or MultiPolygon, got {type(g).__name__}")


def _shoelace(coords: Sequence[Coord]) -> float:
    s = 0.0
    x0, y0 = coords[0]
    # translate to the first vertex to limit cancellation on large coordinates
    for i in range(1, len(coords) - 1):
        xa, ya = coords[i]
        xb, yb = coords[i + 1]
        s += (xa - x0) * (yb - y0) - (xb - x0) * (ya - y0)
    return 0.5 * s


def check_ring(ring: Ring) -> None:
    c = ring.coords
    if len(c) < 2 or c[0] != c[-1]:
        raise InvalidRing("ring is not closed")
    for x, y in c:
        if not (math.isfinite(x) and math.isfinite(y)):
            raise InvalidRing("non-finite coordinate")
        if not (-180.0 - EPS <= x <= 180.0 + EPS and -90.0 - EPS <= y <= 90.0 + EPS):
            raise InvalidRing(f"coordinate out of lon/lat bounds: {(x, y)}")
    if len(set(c[:-1])) < 3:
        raise InvalidRing("ring needs at least 3 distinct vertices")
    x0, y0, x1, y1 = ring.bbox()
    if abs(_shoelace(c)) <= 1e-12 * ((x1 - x0) ** 2 + (y1 - y0) ** 2):
        raise InvalidRing("ring has zero area")


def ring_area(ring: Ring) -> float:
    """Signed shoelace area; positive for counter-clockwise rings."""
    check_ring(ring)
    return _shoelace(ring.coords)


def polygon_area(g: Polygon | MultiPolygon) -> float:
    total = 0.0
    for p in as_multi(g).parts:
        outer = abs(ring_area(p.outer))
        holes = sum(abs(ring_area(h)) for h in p.holes)
        if holes > outer * (1 + 1e-12):
            raise InvalidPolygon("holes cover more area than the outer ring")
        total += max(outer - holes, 0.0)
    return total


def orient(p: Polygon) -> Polygon:
    """Canonical orientation: outer counter-clockwise, holes clockwise."""
    outer = p.outer if _shoelace(p.outer.coords) > 0 else p.outer.reversed()
    holes = tuple(h if _shoelace(h.coords) < 0 else h.reversed() for h in p.holes)
    return Polygon(outer, holes)


def point_in_ring(pt: Coord, coords: Sequence[Coord]) -> int:
    """1 inside, 0 on boundary (within EPS), -1 outside. Even-odd rule."""
    x, y = pt
    inside = False
    n = len(coords) - 1
    for i in range(n):
        x1, y1 = coords[i]
        x2, y2 = coords[i + 1]
        if min(x1, x2) - EPS <= x <= max(x1, x2) + EPS and min(y1, y2) - EPS <= y <= max(y1, y2) + EPS:
            dx, dy = x2 - x1, y2 - y1
            seg = math.hypot(dx, dy)
            if seg == 0.0 or abs(dx * (y - y1) - dy * (x - x1)) <= EPS * seg:
                return 0
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if xc > x:
                inside = not inside
    return 1 if inside else -1


def point_in_polygon(pt: Coord, p: Polygon) -> int:
    r = point_in_ring(pt, p.outer.coords)
    if r <= 0:
        return r
    for h in p.holes:
        rh = point_in_ring(pt, h.coords)
        if rh == 0:
            return 0
        if rh == 1:
            return -1
    return 1


def validate(g: Polygon | MultiPolygon) -> MultiPolygon:
    """Cheap structural validation plus orientation normalization.

    Checks closure, finiteness, coordinate bounds and distinct-vertex count
    on every ring. Full simplicity (no self-intersection) is not checked
    here; see ``is_simple``.
    """
    m = as_multi(g)
    parts = []
    for p in m.parts:
        try:
            for r in p.rings():
                check_ring(r)
        except InvalidRing as exc:
            raise InvalidPolygon(str(exc)) from exc
        parts.append(orient(p))
    return MultiPolygon(tuple(parts))


def _segments_cross(a, b, c, d) -> bool:
    def orient3(p, q, r):
        v = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
        return (v > 0) - (v < 0)

    o1, o2 = orient3(a, b, c), orient3(a, b, d)
    o3, o4 = orient3(c, d, a), orient3(c, d, b)
    return o1 * o2 < 0 and o3 * o4 < 0


def is_simple(ring: Ring) -> bool:
    """True when no two non-adjacent edges properly cross. O(n^2)."""
    c = ring.coords
    n = len(c) - 1
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            if _segments_cross(c[i], c[i + 1], c[j], c[j + 1]):
                return False
    return True


def filter_slivers(m: MultiPolygon, threshold: float) -> MultiPolygon:
    """Keep exactly the parts whose area is at least ``threshold``."""
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    return MultiPolygon(tuple(p for p in m.parts if polygon_area(p) >= threshold))
