"""Minimal polygon shapefile writer used to emit synthetic datasets."""
from __future__ import annotations

import struct
from typing import Mapping, Sequence

from ..geom import MultiPolygon

POLYGON = 5


def _esri_rings(m: MultiPolygon):
    # internal form is outer CCW / holes CW; ESRI wants the reverse
    for p in m.parts:
        yield p.outer.coords[::-1]
        for h in p.holes:
            yield h.coords[::-1]


def _bbox(rings):
    xs = [x for r in rings for x, _ in r]
    ys = [y for r in rings for _, y in r]
    return min(xs), min(ys), max(xs), max(ys)


def _record(m: MultiPolygon) -> bytes:
    rings = list(_esri_rings(m))
    if not rings:
        return struct.pack("<i", 0)
    offsets, pts = [], []
    for r in rings:
        offsets.append(len(pts))
        pts.extend(r)
    out = struct.pack("<i4d", POLYGON, *_bbox(rings))
    out += struct.pack("<ii", len(rings), len(pts))
    out += struct.pack(f"<{len(offsets)}i", *offsets)
    out += struct.pack(f"<{2 * len(pts)}d", *(v for p in pts for v in p))
    return out


def _main_header(length_bytes: int, bbox) -> bytes:
    h = struct.pack(">7i", 9994, 0, 0, 0, 0, 0, length_bytes // 2)
    h += struct.pack("<2i", 1000, POLYGON)
    h += struct.pack("<4d", *bbox)
    h += struct.pack("<4d", 0.0, 0.0, 0.0, 0.0)
    return h


def write_shp(geoms: Sequence[MultiPolygon]) -> tuple[bytes, bytes]:
    """Returns (.shp bytes, .shx bytes)."""
    body = bytearray()
    index = bytearray()
    boxes = []
    for i, g in enumerate(geoms, start=1):
        content = _record(g)
        index += struct.pack(">ii", (100 + len(body)) // 2, len(content) // 2)
        body += struct.pack(">ii", i, len(content) // 2) + content
        if not g.is_empty:
            boxes.append(g.bbox())
    if boxes:
        bbox = (min(b[0] for b in boxes), min(b[1] for b in boxes),
                max(b[2] for b in boxes), max(b[3] for b in boxes))
    else:
        bbox = (0.0, 0.0, 0.0, 0.0)
    shp = _main_header(100 + len(body), bbox) + bytes(body)
    shx = _main_header(100 + len(index), bbox) + bytes(index)
    return shp, shx


def _field_spec(name, values, encoding):
    if all(isinstance(v, int) and not isinstance(v, bool) for v in values):
        width = max([len(str(v)) for v in values] + [1])
        return name, "N", min(max(width, 4), 18), 0
    if all(isinstance(v, (int, float)) for v in values):
        return name, "N", 19, 11
    width = max([len(str(v).encode(encoding)) for v in values] + [1])
    return name, "C", min(width, 254), 0


def write_dbf(rows: Sequence[Mapping[str, object]], fields: Sequence[str] | None = None,
              encoding: str = "latin-1", stamp=(124, 1, 1)) -> bytes:
    """dBase III table. ``stamp`` is the (year-1900, month, day) update date;
    it is fixed so output bytes do not depend on the clock."""
    if fields is None:
        fields = list(rows[0].keys()) if rows else []
    specs = [_field_spec(f, [r[f] for r in rows], encoding) for f in fields]
    rsize = 1 + sum(s[2] for s in specs)
    hsize = 32 + 32 * len(specs) + 1
    out = bytearray(struct.pack("<B3BIHH20x", 3, *stamp, len(rows), hsize, rsize))
    for name, ftype, width, dec in specs:
        nb = name.encode("ascii")[:10]
        out += nb + b"\x00" * (11 - len(nb))
        out += ftype.encode("ascii") + b"\x00" * 4 + bytes([width, dec]) + b"\x00" * 14
    out += b"\r"
    for r in rows:
        out += b" "
        for (name, ftype, width, dec), f in zip(specs, fields):
            v = r[f]
            if ftype == "C":
                raw = str(v).encode(encoding)[:width].ljust(width, b" ")
            elif dec:
                raw = f"{v:{width}.{dec}f}".encode("ascii")
            else:
                raw = str(v).rjust(width).encode("ascii")
            if len(raw) != width:
                raise ValueError(f"value {v!r} does not fit field {name}")
            out += raw
    out += b"\x1a"
    return bytes(out)


def write_layer(base_path, geoms: Sequence[MultiPolygon], rows: Sequence[Mapping[str, object]],
                fields: Sequence[str] | None = None, encoding: str = "latin-1") -> None:
    shp, shx = write_shp(geoms)
    dbf = write_dbf(rows, fields, encoding)
    base = str(base_path)
    for ext, data in ((".shp", shp), (".shx", shx), (".dbf", dbf)):
        with open(base + ext, "wb") as f:
            f.write(data)
