"""Reader for ESRI shapefile (.shp) + dBase III (.dbf) pairs.

Only polygonal layers are supported: shape types 0 (null), 5 (Polygon) and
15 (PolygonZ, with Z and M values discarded). The .shx index is not used;
records are read sequentially.
"""
from __future__ import annotations

import logging
import struct
from dataclasses import dataclass, field
from typing import Union

from ..geom import InvalidRing, MultiPolygon, Polygon, Ring, orient
from ..geom.shapes import point_in_ring
from ..geom.shapes import _shoelace, check_ring

log = logging.getLogger(__name__)

FILE_CODE = 9994
NULL, POLYGON, POLYGONZ = 0, 5, 15
SUPPORTED = (NULL, POLYGON, POLYGONZ)

AttrValue = Union[str, int, float, None]


class ShapefileError(ValueError):
    pass


class NotAShapefile(ShapefileError):
    pass


class UnsupportedShapeType(ShapefileError):
    pass


class CorruptPair(ShapefileError):
    pass


class TruncatedFile(ShapefileError):
    pass


@dataclass(frozen=True)
class Feature:
    geometry: MultiPolygon
    attributes: dict[str, AttrValue] = field(default_factory=dict)


@dataclass(frozen=True)
class GeoLayer:
    features: tuple[Feature, ...] = ()

    def __len__(self):
        return len(self.features)

    def __iter__(self):
        return iter(self.features)


# -- .shp ----------------------------------------------------------------------

def read_header(shp: bytes) -> tuple[int, int, tuple[float, float, float, float]]:
    """Returns (file length in bytes, shape type, xy bbox)."""
    if len(shp) >= 4 and struct.unpack(">i", shp[:4])[0] != FILE_CODE:
        raise NotAShapefile(f"file code {struct.unpack('>i', shp[:4])[0]} != {FILE_CODE}")
    if len(shp) < 100:
        raise TruncatedFile(f"main header needs 100 bytes, got {len(shp)}")
    length = struct.unpack(">i", shp[24:28])[0] * 2
    version, stype = struct.unpack("<ii", shp[28:36])
    if version != 1000:
        log.warning("event=shapefile_version version=%d expected=1000", version)
    if stype not in SUPPORTED:
        raise UnsupportedShapeType(f"shape type {stype}")
    bbox = struct.unpack("<4d", shp[36:68])
    return length, stype, bbox


def _rings_to_multipolygon(rings: list[list[tuple[float, float]]]) -> MultiPolygon:
    # ESRI outer rings run clockwise, holes counter-clockwise
    outers, holes = [], []
    for pts in rings:
        if pts[0] != pts[-1]:
            pts = pts + [pts[0]]
        ring = Ring(tuple(pts))
        try:
            check_ring(ring)
        except InvalidRing as exc:
            if "zero area" in str(exc) or "distinct" in str(exc):
                # degenerate rings carry no area; skip them
                continue
            raise
        a = _shoelace(ring.coords)
        (outers if a < 0 else holes).append((abs(a), ring))
    outers.sort(key=lambda t: t[0])
    assigned: list[list[Ring]] = [[] for _ in outers]
    for _, h in holes:
        probe = h.coords[0]
        for i, (_, o) in enumerate(outers):
            if point_in_ring(probe, o.coords) >= 0:
                assigned[i].append(h)
                break
        else:
            # a counter-clockwise ring with no container: treat as an outer
            outers.append((0.0, h))
            assigned.append([])
    parts = [orient(Polygon(o, tuple(hs))) for (_, o), hs in zip(outers, assigned)]
    return MultiPolygon(tuple(parts))


def _parse_polygon(content: bytes, stype: int, recno: int) -> MultiPolygon:
    if len(content) < 44:
        raise TruncatedFile(f"record {recno}: polygon header truncated")
    nparts, npoints = struct.unpack("<ii", content[36:44])
    if nparts < 0 or npoints < 0:
        raise CorruptPair(f"record {recno}: negative part/point count")
    need = 44 + 4 * nparts + 16 * npoints
    if stype == POLYGONZ:
        need += 16 + 8 * npoints  # z range + z values; m block is optional
    if len(content) < need:
        raise TruncatedFile(f"record {recno}: needs {need} bytes, has {len(content)}")
    offsets = list(struct.unpack(f"<{nparts}i", content[44:44 + 4 * nparts]))
    base = 44 + 4 * nparts
    flat = struct.unpack(f"<{2 * npoints}d", content[base:base + 16 * npoints])
    pts = list(zip(flat[0::2], flat[1::2]))
    rings = []
    for k, start in enumerate(offsets):
        end = offsets[k + 1] if k + 1 < nparts else npoints
        if not 0 <= start <= end <= npoints:
            raise CorruptPair(f"record {recno}: bad part offsets {offsets}")
        if end - start >= 3:
            rings.append(pts[start:end])
    return _rings_to_multipolygon(rings)


def parse_shp(shp: bytes) -> list[MultiPolygon]:
    length, stype, _ = read_header(shp)
    if length > len(shp):
        raise TruncatedFile(f"header declares {length} bytes, file has {len(shp)}")
    out = []
    pos = 100
    while pos < length:
        if pos + 8 > length:
            raise TruncatedFile(f"record header truncated at byte {pos}")
        recno, clen = struct.unpack(">ii", shp[pos:pos + 8])
        clen *= 2
        pos += 8
        if pos + clen > length or clen < 4:
            raise TruncatedFile(f"record {recno} truncated")
        content = shp[pos:pos + clen]
        pos += clen
        rtype = struct.unpack("<i", content[:4])[0]
        if rtype == NULL:
            out.append(MultiPolygon(()))
        elif rtype == stype and rtype in (POLYGON, POLYGONZ):
            out.append(_parse_polygon(content, rtype, recno))
        else:
            raise UnsupportedShapeType(f"record {recno}: shape type {rtype}")
    return out


# -- .dbf ----------------------------------------------------------------------

@dataclass(frozen=True)
class DbfField:
    name: str
    ftype: str
    length: int
    decimals: int


def _convert(raw: bytes, fld: DbfField, encoding: str) -> AttrValue:
    if fld.ftype == "C":
        return raw.decode(encoding).rstrip(" \x00")
    text = raw.decode("ascii", errors="replace").strip(" \x00")
    if fld.ftype in "NF":
        if not text or set(text) <= {"*"}:
            return None
        if fld.ftype == "N" and fld.decimals == 0:
            try:
                return int(text)
            except ValueError:
                pass
        try:
            return float(text)
        except ValueError:
            raise CorruptPair(f"field {fld.name}: bad number {text!r}") from None
    # D, L and anything else pass through as text
    return text


def parse_dbf(dbf: bytes, encoding: str = "latin-1") -> list[dict[str, AttrValue]]:
    if len(dbf) < 32:
        raise TruncatedFile("dbf header truncated")
    nrec, hsize, rsize = struct.unpack("<IHH", dbf[4:12])
    if hsize < 33 or len(dbf) < hsize:
        raise TruncatedFile("dbf field descriptors truncated")
    fields: list[DbfField] = []
    pos = 32
    while pos < hsize and dbf[pos] != 0x0D:
        desc = dbf[pos:pos + 32]
        if len(desc) < 32:
            raise TruncatedFile("dbf field descriptor truncated")
        name = desc[:11].split(b"\x00", 1)[0].decode("ascii", errors="replace").strip()
        fields.append(DbfField(name, chr(desc[11]), desc[16], desc[17]))
        pos += 32
    names = [f.name for f in fields]
    if len(set(names)) != len(names):
        raise CorruptPair(f"duplicate dbf field names: {names}")
    if 1 + sum(f.length for f in fields) != rsize:
        raise CorruptPair("dbf record size disagrees with field widths")
    if hsize + nrec * rsize > len(dbf):
        raise TruncatedFile(f"dbf declares {nrec} records but data ends early")
    rows = []
    pos = hsize
    for _ in range(nrec):
        rec = dbf[pos:pos + rsize]
        pos += rsize
        # records flagged deleted ('*') are kept so rows stay aligned with .shp
        off = 1
        row = {}
        for f in fields:
            row[f.name] = _convert(rec[off:off + f.length], f, encoding)
            off += f.length
        rows.append(row)
    return rows


def parse_shapefile(shp_bytes: bytes, dbf_bytes: bytes, encoding: str = "latin-1") -> list[Feature]:
    if not shp_bytes or not dbf_bytes:
        raise TruncatedFile("empty input")
    geoms = parse_shp(shp_bytes)
    attrs = parse_dbf(dbf_bytes, encoding)
    if len(geoms) != len(attrs):
        raise CorruptPair(f"{len(geoms)} shapes but {len(attrs)} attribute rows")
    return [Feature(g, a) for g, a in zip(geoms, attrs)]


def read_layer(base_path, encoding: str = "latin-1") -> GeoLayer:
    """Load ``<base>.shp`` and ``<base>.dbf`` from disk."""
    base = str(base_path)
    if base.endswith(".shp") or base.endswith(".dbf"):
        base = base[:-4]
    with open(base + ".shp", "rb") as f:
        shp = f.read()
    with open(base + ".dbf", "rb") as f:
        dbf = f.read()
    return GeoLayer(tuple(parse_shapefile(shp, dbf, encoding)))
