import math
import random

import pytest
from hypothesis import given, strategies as st

from fsconflict.geom import (
    InvalidPolygon,
    InvalidRing,
    MultiPolygon,
    Polygon,
    Ring,
    difference,
    dissolve,
    filter_slivers,
    intersect,
    is_simple,
    point_in_polygon,
    polygon_area,
    rect,
    ring_area,
    union,
    validate,
)
from oracles import clip_convex, random_convex, shoelace, star_polygon

shapely = pytest.importorskip("shapely")
from shapely.geometry import Polygon as SPolygon  # noqa: E402


def poly(pts, holes=()):
    return Polygon(Ring.closed(pts), tuple(Ring.closed(h) for h in holes))


def unit_square():
    return poly([(0, 0), (1, 0), (1, 1), (0, 1)])


# -- areas ----------------------------------------------------------------------


def test_ring_area_examples():
    sq = Ring.closed([(0, 0), (1, 0), (1, 1), (0, 1)])
    assert ring_area(sq) == 1.0
    assert ring_area(sq.reversed()) == -1.0
    assert ring_area(Ring.closed([(0, 0), (2, 0), (0, 2)])) == 2.0


def test_ring_area_rejects_open_and_degenerate():
    with pytest.raises(InvalidRing):
        ring_area(Ring(((0, 0), (1, 0), (1, 1))))
    with pytest.raises(InvalidRing):
        ring_area(Ring.closed([(0, 0), (1, 0), (0, 0)]))
    with pytest.raises(InvalidRing):
        ring_area(Ring.closed([(0, 0), (1, 1), (2, 2)]))


def test_polygon_area_examples():
    holed = poly([(0, 0), (1, 0), (1, 1), (0, 1)], [[(0.25, 0.25), (0.75, 0.25), (0.75, 0.75), (0.25, 0.75)]])
    assert polygon_area(holed) == pytest.approx(0.75, abs=1e-15)
    assert polygon_area(MultiPolygon(())) == 0.0
    assert polygon_area(MultiPolygon((rect(0, 0, 1, 1), rect(2, 0, 3, 1)))) == 2.0


def test_hole_larger_than_outer_is_invalid():
    p = poly([(0, 0), (1, 0), (1, 1), (0, 1)], [[(-1, -1), (2, -1), (2, 2), (-1, 2)]])
    with pytest.raises(InvalidPolygon):
        polygon_area(p)


def test_validate_normalizes_orientation():
    cw = poly([(0, 0), (0, 1), (1, 1), (1, 0)], [[(0.2, 0.2), (0.4, 0.2), (0.4, 0.4), (0.2, 0.4)]])
    m = validate(cw)
    assert ring_area(m.parts[0].outer) > 0
    assert ring_area(m.parts[0].holes[0]) < 0


def test_validate_rejects_out_of_range_and_nan():
    with pytest.raises(InvalidPolygon):
        validate(poly([(0, 0), (200, 0), (200, 1)]))
    with pytest.raises(InvalidPolygon):
        validate(poly([(0, 0), (float("nan"), 0), (1, 1)]))


def test_is_simple():
    assert is_simple(Ring.closed([(0, 0), (1, 0), (1, 1), (0, 1)]))
    assert not is_simple(Ring.closed([(0, 0), (1, 1), (1, 0), (0, 1)]))  # bow tie


def test_point_in_polygon():
    p = poly([(0, 0), (4, 0), (4, 4), (0, 4)], [[(1, 1), (3, 1), (3, 3), (1, 3)]])
    assert point_in_polygon((0.5, 0.5), p) == 1
    assert point_in_polygon((2, 2), p) == -1
    assert point_in_polygon((4, 2), p) == 0
    assert point_in_polygon((5, 5), p) == -1


# -- intersection examples -------------------------------------------------------


def test_disjoint_squares_empty():
    assert intersect(rect(0, 0, 1, 1), rect(2, 2, 3, 3)).is_empty


def test_idempotent():
    a = poly([(0, 0), (3, 0), (3, 1), (1, 1), (1, 3), (0, 3)])
    assert polygon_area(intersect(a, a)) == pytest.approx(polygon_area(a), rel=1e-9)


def test_shifted_square_overlap():
    assert polygon_area(intersect(unit_square(), rect(0.5, 0.5, 1.5, 1.5))) == pytest.approx(0.25, abs=1e-12)


def test_shared_edge_only_is_empty():
    # touching along an edge or a corner leaves no area
    assert intersect(rect(0, 0, 1, 1), rect(1, 0, 2, 1)).is_empty
    assert intersect(rect(0, 0, 1, 1), rect(1, 1, 2, 2)).is_empty


def test_invalid_input_raises():
    with pytest.raises(InvalidPolygon):
        intersect(poly([(0, 0), (1, 0), (2, 0)]), unit_square())


def test_concave_with_hole_against_shapely():
    a = poly([(0, 0), (6, 0), (6, 6), (3, 2), (0, 6)], [[(1, 0.5), (2, 0.5), (2, 1.5), (1, 1.5)]])
    b = MultiPolygon((rect(0.5, 0.2, 5.5, 1.0), rect(2.5, 1.5, 4.0, 5.0)))
    ours = polygon_area(intersect(a, b))
    sa = SPolygon(a.outer.coords, [h.coords for h in a.holes])
    sb = SPolygon(b.parts[0].outer.coords).union(SPolygon(b.parts[1].outer.coords))
    assert ours == pytest.approx(sa.intersection(sb).area, rel=1e-12)


def test_hole_fully_covering_other_input():
    a = poly([(0, 0), (4, 0), (4, 4), (0, 4)], [[(1, 1), (3, 1), (3, 3), (1, 3)]])
    assert intersect(a, rect(1.5, 1.5, 2.5, 2.5)).is_empty


def test_union_difference():
    a, b = rect(0, 0, 2, 2), rect(1, 1, 3, 3)
    assert polygon_area(union(a, b)) == pytest.approx(7.0)
    assert polygon_area(difference(a, b)) == pytest.approx(3.0)
    d = dissolve([rect(i, 0, i + 1, 1) for i in range(5)])
    assert polygon_area(d) == pytest.approx(5.0)
    assert len(d) == 1


def test_dissolve_with_hole_ring():
    ring = [rect(0, 0, 3, 1), rect(0, 2, 3, 3), rect(0, 1, 1, 2), rect(2, 1, 3, 2)]
    d = dissolve(ring)
    assert polygon_area(d) == pytest.approx(8.0)
    assert len(d) == 1 and len(d.parts[0].holes) == 1


# -- sliver filter ----------------------------------------------------------------


def test_filter_slivers_examples():
    small = rect(0, 0, 0.04, 0.1)  # 0.004
    big = rect(1, 1, 2, 1.1)  # 0.1
    m = MultiPolygon((small, big))
    assert filter_slivers(m, 0.005).parts == (big,)
    assert filter_slivers(m, 0.0) == m
    assert filter_slivers(m, 1.0).is_empty
    with pytest.raises(ValueError):
        filter_slivers(m, -1)


@given(st.lists(st.floats(0.001, 1.0), min_size=0, max_size=6), st.floats(0, 0.5))
def test_filter_slivers_idempotent_monotone(widths, thr):
    m = MultiPolygon(tuple(rect(3 * i, 0, 3 * i + w, 1) for i, w in enumerate(widths)))
    once = filter_slivers(m, thr)
    assert filter_slivers(once, thr) == once
    assert polygon_area(once) <= polygon_area(m)
    assert all(polygon_area(p) >= thr for p in once)


# -- randomized properties ----------------------------------------------------------


@given(st.integers(0, 2**32 - 1))
def test_convex_matches_halfplane_oracle(seed):
    rng = random.Random(seed)
    a = random_convex(rng, 0, 0, 1)
    b = random_convex(rng, rng.uniform(-1, 1), rng.uniform(-1, 1), 1)
    got = polygon_area(intersect(poly(a), poly(b)))
    clipped = clip_convex(a, b)
    want = abs(shoelace(clipped)) if len(clipped) >= 3 else 0.0
    assert got == pytest.approx(want, rel=1e-7, abs=1e-12)


def _rand_multi(rng):
    # parts 6 apart never overlap (reach is at most 3.5 from the part origin)
    parts = []
    for i in range(rng.randint(1, 3)):
        parts.append(poly(star_polygon(rng, 6 * i + rng.uniform(0, 2), rng.uniform(0, 2), 1.5, rng.randint(3, 9))))
    return MultiPolygon(tuple(parts))


@given(st.integers(0, 2**32 - 1))
def test_monotone_and_symmetric(seed):
    rng = random.Random(seed)
    a, b = _rand_multi(rng), _rand_multi(rng)
    ab = polygon_area(intersect(a, b))
    ba = polygon_area(intersect(b, a))
    assert ab <= min(polygon_area(a), polygon_area(b)) + 1e-9
    assert abs(ab - ba) <= 1e-9


@given(st.integers(0, 2**32 - 1))
def test_star_pairs_against_shapely(seed):
    rng = random.Random(seed)
    a = star_polygon(rng, 0, 0, 1, rng.randint(3, 12))
    b = star_polygon(rng, rng.uniform(-1, 1), rng.uniform(-1, 1), 1, rng.randint(3, 12))
    want = SPolygon(a).intersection(SPolygon(b)).area
    assert polygon_area(intersect(poly(a), poly(b))) == pytest.approx(want, rel=1e-9, abs=1e-12)


@given(st.integers(0, 2**32 - 1))
def test_output_parts_disjoint(seed):
    rng = random.Random(seed)
    a, b = _rand_multi(rng), _rand_multi(rng)
    out = intersect(a, b)
    total = polygon_area(out)
    # pairwise-disjoint parts: summed part areas equal the area of their union
    assert polygon_area(dissolve(list(out.parts))) == pytest.approx(total, rel=1e-9, abs=1e-12)


def test_collinear_and_shared_vertices_grid():
    # admin-like tiling: adjacent rectangles sharing edges and vertices
    cells = [rect(x, y, x + 1, y + 1) for x in range(3) for y in range(3)]
    fs = poly([(0.5, 0.5), (2.5, 0.5), (2.5, 2.5), (0.5, 2.5)])
    areas = [polygon_area(intersect(fs, c)) for c in cells]
    assert math.fsum(areas) == pytest.approx(4.0, rel=1e-12)
    assert sorted(set(round(a, 12) for a in areas)) == [0.25, 0.5, 1.0]
