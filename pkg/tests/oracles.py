"""Reference implementations used only by the tests.

Each one is written from the definition, without sharing code with the
package, so agreement between the two is evidence rather than tautology.
"""
from __future__ import annotations

import datetime as dt
import functools
import math
import random
import struct
import unicodedata

# -- geometry ----------------------------------------------------------------


def shoelace(pts):
    """Signed area of an open vertex list."""
    n = len(pts)
    return 0.5 * math.fsum(pts[i][0] * pts[(i + 1) % n][1] - pts[(i + 1) % n][0] * pts[i][1] for i in range(n))


def convex_hull(points):
    pts = sorted(set(points))
    if len(pts) < 3:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]  # counter-clockwise


def random_convex(rng: random.Random, cx, cy, r, n_pts=8):
    while True:
        pts = [(cx + rng.uniform(-r, r), cy + rng.uniform(-r, r)) for _ in range(n_pts)]
        hull = convex_hull(pts)
        if len(hull) >= 3 and shoelace(hull) > 1e-6 * r * r:
            return hull


def clip_convex(subject, clip):
    """Sutherland-Hodgman: subject clipped by each half-plane of a CCW convex clip polygon."""
    out = list(subject)
    n = len(clip)
    for i in range(n):
        a, b = clip[i], clip[(i + 1) % n]
        if not out:
            break

        def side(p):
            return (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])

        inp, out = out, []
        for j in range(len(inp)):
            p, q = inp[j], inp[(j + 1) % len(inp)]
            sp, sq = side(p), side(q)
            if sp >= 0:
                out.append(p)
            if (sp >= 0) != (sq >= 0):
                t = sp / (sp - sq)
                out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def star_polygon(rng: random.Random, cx, cy, r, k):
    """Simple (star-shaped) polygon with k vertices around (cx, cy).

    Jittered even spacing keeps every angular gap below pi for k >= 4,
    which is what keeps the ring simple; k == 3 is a triangle anyway.
    """
    angs = [2 * math.pi * (i + rng.uniform(0, 0.8)) / k for i in range(k)]
    rad = [r * rng.uniform(0.3, 1.0) for _ in angs]
    return [(cx + q * math.cos(t), cy + q * math.sin(t)) for q, t in zip(rad, angs)]


# -- shapefile / dBase bytes, assembled by hand ---------------------------------


def _bbox(points):
    xs = [p[0] for p in points] or [0.0]
    ys = [p[1] for p in points] or [0.0]
    return min(xs), min(ys), max(xs), max(ys)


def shp_polygon_content(parts, shape_type=5):
    """Record content for a Polygon (5) or PolygonZ (15). ``parts`` are closed rings."""
    pts = [p for ring in parts for p in ring]
    offsets, k = [], 0
    for ring in parts:
        offsets.append(k)
        k += len(ring)
    body = struct.pack("<i4d2i", shape_type, *_bbox(pts), len(parts), len(pts))
    body += struct.pack(f"<{len(parts)}i", *offsets)
    body += b"".join(struct.pack("<2d", x, y) for x, y in pts)
    if shape_type == 15:
        z = [float(i) for i in range(len(pts))]
        body += struct.pack("<2d", min(z), max(z)) + struct.pack(f"<{len(pts)}d", *z)
        body += struct.pack("<2d", 0.0, 0.0) + struct.pack(f"<{len(pts)}d", *([0.0] * len(pts)))
    return body


def shp_bytes(records, shape_type=5, file_code=9994, declared_words=None):
    """records: list of record contents (bytes) as produced above, or None for a null shape."""
    payload = b""
    all_pts = []
    for i, content in enumerate(records, start=1):
        if content is None:
            content = struct.pack("<i", 0)
        payload += struct.pack(">2i", i, len(content) // 2) + content
    words = (100 + len(payload)) // 2 if declared_words is None else declared_words
    header = struct.pack(">7i", file_code, 0, 0, 0, 0, 0, words)
    header += struct.pack("<2i", 1000, shape_type)
    header += struct.pack("<4d", *_bbox(all_pts)) + struct.pack("<4d", 0, 0, 0, 0)
    assert len(header) == 100
    return header + payload


def dbf_bytes(fields, rows, encoding="latin-1"):
    """fields: (name, type 'C'|'N', length, decimals); rows: tuples of values."""
    nf = len(fields)
    header_len = 32 + 32 * nf + 1
    rec_len = 1 + sum(f[2] for f in fields)
    out = struct.pack("<B3BIHH20x", 0x03, 124, 1, 1, len(rows), header_len, rec_len)
    for name, typ, length, dec in fields:
        out += name.encode("ascii").ljust(11, b"\0") + typ.encode("ascii") + b"\0" * 4
        out += struct.pack("<BB", length, dec) + b"\0" * 14
    out += b"\r"
    for row in rows:
        rec = b" "
        for (name, typ, length, dec), v in zip(fields, row):
            if typ == "C":
                rec += str(v).encode(encoding)[:length].ljust(length, b" ")
            else:
                s = "" if v is None else (f"{v:.{dec}f}" if dec else str(int(v)))
                rec += s.encode("ascii").rjust(length, b" ")
        out += rec
    return out + b"\x1a"


# -- fusion -------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def fold_name(s):
    s = unicodedata.normalize("NFKD", s.casefold())
    s = "".join(c for c in s if not unicodedata.combining(c))
    return " ".join(s.split())


def month_number(year, month):
    return year * 12 + (month - 1)


def brute_counts(events, unit, year, month, months_back):
    """(count, fatalities) of events in the unit during the ``months_back``
    calendar months strictly before (year, month). Linear scan."""
    target = month_number(year, month)
    n = fat = 0
    for e in events:
        if (fold_name(e.country), fold_name(e.admin1), fold_name(e.admin2)) != unit:
            continue
        m = month_number(e.event_date.year, e.event_date.month)
        if target - months_back <= m < target:
            n += 1
            fat += e.fatalities
    return n, fat


def brute_type_counts(events, unit, year, month, months_back, event_type):
    target = month_number(year, month)
    return sum(
        1 for e in events
        if (fold_name(e.country), fold_name(e.admin1), fold_name(e.admin2)) == unit
        and e.event_type == event_type
        and target - months_back <= month_number(e.event_date.year, e.event_date.month) < target
    )


# -- statistics -----------------------------------------------------------------


def definitional_ranks(values):
    """rank_i = 1 + #(v < v_i) + (#(v == v_i) - 1) / 2, quadratic time."""
    return [1 + sum(w < v for w in values) + (sum(w == v for w in values) - 1) / 2 for v in values]


def pearson(a, b):
    n = len(a)
    ma = math.fsum(a) / n
    mb = math.fsum(b) / n
    sab = math.fsum((x - ma) * (y - mb) for x, y in zip(a, b))
    saa = math.fsum((x - ma) ** 2 for x in a)
    sbb = math.fsum((y - mb) ** 2 for y in b)
    return sab / math.sqrt(saa * sbb)


def spearman_ref(x, y):
    return pearson(definitional_ranks(x), definitional_ranks(y))


def _t_density(x, df):
    c = math.lgamma((df + 1) / 2) - math.lgamma(df / 2) - 0.5 * math.log(df * math.pi)
    return math.exp(c - (df + 1) / 2 * math.log1p(x * x / df))


def _adaptive_simpson(f, a, b, eps, whole, fa, fm, fb, depth):
    m = (a + b) / 2
    lm, rm = (a + m) / 2, (m + b) / 2
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6 * (fa + 4 * flm + fm)
    right = (b - m) / 6 * (fm + 4 * frm + fb)
    if depth <= 0 or abs(left + right - whole) <= 15 * eps:
        return left + right + (left + right - whole) / 15
    return (_adaptive_simpson(f, a, m, eps / 2, left, fa, flm, fm, depth - 1)
            + _adaptive_simpson(f, m, b, eps / 2, right, fm, frm, fb, depth - 1))


def integrate(f, a, b, eps=1e-13):
    fa, fm, fb = f(a), f((a + b) / 2), f(b)
    whole = (b - a) / 6 * (fa + 4 * fm + fb)
    return _adaptive_simpson(f, a, b, eps, whole, fa, fm, fb, 50)


def t_two_sided_p(rho, n):
    """Two-sided p for Spearman's t statistic, integrating the t density.
    Substituting x = tan(theta) maps the tail onto a finite interval."""
    df = n - 2
    if abs(rho) >= 1.0:
        return 0.0
    t = abs(rho) * math.sqrt(df / (1 - rho * rho))

    def g(theta):
        c = math.cos(theta)
        return _t_density(math.tan(theta), df) / (c * c)

    tail = integrate(g, math.atan(t), math.pi / 2 - 1e-12)
    return min(1.0, 2 * tail)


# -- baselines ----------------------------------------------------------------


class Unpredictable(Exception):
    pass


def replay(history, target):
    """Walk the history once in time order and return (pps, sply, max2pp),
    each either a phase or Unpredictable. history: {(year, month): phase}."""
    last = prev = None
    for key in sorted(history):
        if key >= target:
            break
        prev, last = last, history[key]
    pps = last if last is not None else Unpredictable
    max2 = max(last, prev) if prev is not None else Unpredictable
    sply = history.get((target[0] - 1, target[1]), Unpredictable)
    return pps, sply, max2


# -- ACLED corpus -------------------------------------------------------------

EVENT_TYPES = ("Battles", "Explosions/Remote violence", "Protests", "Riots",
               "Strategic developments", "Violence against civilians")


def random_event_rows(rng: random.Random, n):
    names = ["Turkana", "Ségou", "Nord, Est", 'Quote "Q"', "  spaced  out ", "Ñuñoa", "a\nb"]
    start = dt.date(2015, 1, 1).toordinal()
    rows = []
    for _ in range(n):
        rows.append(dict(
            event_date=dt.date.fromordinal(start + rng.randrange(3650)),
            event_type=rng.choice(EVENT_TYPES),
            country=rng.choice(names),
            admin1=rng.choice(names),
            admin2=rng.choice(names) + str(rng.randrange(50)),
            latitude=rng.uniform(-90, 90),
            longitude=rng.uniform(-180, 180),
            fatalities=rng.choice([0, 0, 1, 2, 5, rng.randrange(1000)]),
        ))
    return rows
