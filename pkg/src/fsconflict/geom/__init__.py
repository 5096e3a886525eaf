from .shapes import (
    EPS,
    Coord,
    GeometryError,
    InvalidPolygon,
    InvalidRing,
    MultiPolygon,
    Polygon,
    Ring,
    as_multi,
    filter_slivers,
    is_simple,
    orient,
    point_in_polygon,
    polygon_area,
    rect,
    ring_area,
    validate,
)
from .sweep import Op, boolean, difference, dissolve, union
from .sweep import intersect as _raw_intersect


def intersect(a, b) -> MultiPolygon:
    """Region covered by both inputs. Raises InvalidPolygon on bad input."""
    return _raw_intersect(validate(a), validate(b))


__all__ = [
    "EPS", "Coord", "GeometryError", "InvalidPolygon", "InvalidRing", "MultiPolygon",
    "Polygon", "Ring", "Op", "as_multi", "boolean", "difference", "dissolve",
    "filter_slivers", "intersect", "is_simple", "orient", "point_in_polygon",
    "polygon_area", "rect", "ring_area", "union", "validate",
]
