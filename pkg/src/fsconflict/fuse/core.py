"""Overlay of FS and admin layers, conflict aggregation and the lagged join."""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from ..geom import MultiPolygon, as_multi, filter_slivers, intersect, polygon_area
from ..ingest import EVENT_TYPES, ConflictEvent, GeoLayer, Period, SchemaError, YearMonth, normalize_name

log = logging.getLogger(__name__)

ADMIN_FIELDS = ("ADMIN0", "ADMIN1", "ADMIN2")
PHASE_FIELD = "CS"
PHASES = range(1, 6)


@dataclass(frozen=True, order=True)
class AdminUnit:
    country: str
    admin1: str
    admin2: str

    def __post_init__(self):
        if not self.country:
            raise ValueError("AdminUnit needs a country")

    @classmethod
    def of(cls, country: str, admin1: str, admin2: str) -> "AdminUnit":
        return cls(normalize_name(country), normalize_name(admin1), normalize_name(admin2))

    @property
    def key(self) -> str:
        return f"{self.country}/{self.admin1}/{self.admin2}"


@dataclass(frozen=True)
class FSRecord:
    unit: AdminUnit
    period: Period
    phase: int
    area: float


@dataclass(frozen=True)
class ConflictAggregate:
    unit: AdminUnit
    ym: YearMonth
    count_total: int
    count_by_type: Mapping[str, int]
    fatalities: int


@dataclass(frozen=True)
class FusedRecord:
    unit: AdminUnit
    period: Period
    phase: int
    lag3_conflicts: int
    lag3_fatalities: int
    lag3_by_type: Mapping[str, int]
    cum24_conflicts: int
    cum24_fatalities: int
    area: float = 0.0


# -- step 1: overlay ------------------------------------------------------------

def _attr(feature, name):
    try:
        return feature.attributes[name]
    except KeyError:
        raise SchemaError(f"feature lacks attribute {name!r}") from None


def _bbox_overlap(a, b) -> bool:
    return not (a[2] < b[0] or b[2] < a[0] or a[3] < b[1] or b[3] < a[1])


def overlay(
    fs_layer: GeoLayer | Iterable,
    admin_layer: GeoLayer | Iterable,
    sliver_threshold: float = 0.005,
    period: Period | None = None,
    phase_field: str = PHASE_FIELD,
    admin_fields: Sequence[str] = ADMIN_FIELDS,
) -> list[FSRecord]:
    """Intersect every FS feature with every admin feature.

    The period comes from ``period`` or, if None, from each FS feature's
    ``period`` attribute (YYYYMM). One record per (FS feature, admin
    feature) pair whose sliver-filtered intersection is non-empty.
    """
    fs = list(fs_layer)
    admins = []
    for f in admin_layer:
        names = [str(_attr(f, k)) for k in admin_fields]
        admins.append((AdminUnit.of(*names), f.geometry, f.geometry.bbox()))

    out: list[FSRecord] = []
    dropped = 0
    for f in fs:
        raw = _attr(f, phase_field)
        phase = int(raw) if raw is not None else None
        if phase not in PHASES:
            dropped += 1
            continue
        per = period if period is not None else Period.parse(_attr(f, "period"))
        parts = as_multi(f.geometry).parts
        boxes = [p.bbox() for p in parts]
        for unit, geom, abox in admins:
            if abox is None:
                continue
            near = [p for p, b in zip(parts, boxes) if _bbox_overlap(b, abox)]
            if not near:
                continue
            piece = filter_slivers(intersect(MultiPolygon(tuple(near)), geom), sliver_threshold)
            if piece.is_empty:
                continue
            out.append(FSRecord(unit, per, phase, polygon_area(piece)))
    if dropped:
        log.info("event=overlay phase_out_of_range_dropped=%d", dropped)
    return out


def dedup_worst(records: Iterable[FSRecord]) -> list[FSRecord]:
    """One record per (unit, period): worst (highest) phase, summed area."""
    phase: dict = {}
    area: dict = defaultdict(float)
    for r in records:
        k = (r.unit, r.period)
        phase[k] = max(phase.get(k, r.phase), r.phase)
        area[k] += r.area
    return [FSRecord(u, p, phase[(u, p)], area[(u, p)]) for u, p in sorted(phase)]


# -- step 2: conflicts ----------------------------------------------------------

def aggregate_conflicts(events: Iterable[ConflictEvent]) -> list[ConflictAggregate]:
    counts: dict = defaultdict(lambda: dict.fromkeys(EVENT_TYPES, 0))
    fat: dict = defaultdict(int)
    for e in events:
        k = (AdminUnit.of(e.country, e.admin1, e.admin2), e.ym)
        counts[k][e.event_type] += 1
        fat[k] += e.fatalities
    return [
        ConflictAggregate(u, ym, sum(counts[(u, ym)].values()), counts[(u, ym)], fat[(u, ym)])
        for u, ym in sorted(counts)
    ]


# -- step 3: lagged join --------------------------------------------------------

def lag_window(p: Period | YearMonth, lag_months: int = 3) -> list[YearMonth]:
    """The ``lag_months`` calendar months strictly before ``p``, oldest first."""
    if lag_months < 1:
        raise ValueError("lag_months must be >= 1")
    ym = p.ym if isinstance(p, Period) else p
    return [ym.shift(-k) for k in range(lag_months, 0, -1)]


def rolling_window(p: Period | YearMonth, months: int = 24) -> list[YearMonth]:
    return lag_window(p, months)


class _Index:
    def __init__(self, aggs: Iterable[ConflictAggregate]):
        self.by: dict[tuple[AdminUnit, int], ConflictAggregate] = {}
        for a in aggs:
            k = (a.unit, a.ym.index)
            if k in self.by:
                raise ValueError(f"duplicate aggregate for {a.unit.key} {a.ym}")
            self.by[k] = a

    def totals(self, unit: AdminUnit, months: Sequence[YearMonth]):
        n = fat = 0
        by_type = dict.fromkeys(EVENT_TYPES, 0)
        for ym in months:
            a = self.by.get((unit, ym.index))
            if a is None:
                continue
            n += a.count_total
            fat += a.fatalities
            for t, c in a.count_by_type.items():
                by_type[t] += c
        return n, fat, by_type


def window_totals(aggs, unit: AdminUnit, months: Sequence[YearMonth]):
    """(count, fatalities, per-type counts) summed over ``months``."""
    idx = aggs if isinstance(aggs, _Index) else _Index(aggs)
    return idx.totals(unit, months)


def rolling_24m(aggs, p: Period, unit: AdminUnit, window: int = 24) -> tuple[int, int]:
    n, fat, _ = window_totals(aggs, unit, rolling_window(p, window))
    return n, fat


def lag_join(
    fs: Iterable[FSRecord],
    aggs: Iterable[ConflictAggregate],
    lag_months: int = 3,
    cumulative_window: int = 24,
) -> list[FusedRecord]:
    idx = _Index(aggs)
    out = []
    for r in fs:
        n, fat, by_type = idx.totals(r.unit, lag_window(r.period, lag_months))
        cn, cfat, _ = idx.totals(r.unit, rolling_window(r.period, cumulative_window))
        out.append(FusedRecord(r.unit, r.period, r.phase, n, fat, by_type, cn, cfat, r.area))
    out.sort(key=lambda f: (f.unit, f.period))
    return out


@dataclass
class JoinReport:
    """Share of FS units per country that matched any conflict rows, plus
    conflict units that never matched an FS unit."""

    fs_units: dict[str, int] = field(default_factory=dict)
    matched_units: dict[str, int] = field(default_factory=dict)
    unmatched_conflict_units: list[AdminUnit] = field(default_factory=list)

    def match_rate(self, country: str) -> float:
        n = self.fs_units.get(country, 0)
        return self.matched_units.get(country, 0) / n if n else 0.0

    def rows(self):
        for c in sorted(self.fs_units):
            yield c, self.fs_units[c], self.matched_units.get(c, 0), self.match_rate(c)


def join_report(fs: Iterable[FSRecord], aggs: Iterable[ConflictAggregate]) -> JoinReport:
    fs_units = {r.unit for r in fs}
    agg_units = {a.unit for a in aggs}
    rep = JoinReport()
    for u in fs_units:
        rep.fs_units[u.country] = rep.fs_units.get(u.country, 0) + 1
        if u in agg_units:
            rep.matched_units[u.country] = rep.matched_units.get(u.country, 0) + 1
    rep.unmatched_conflict_units = sorted(agg_units - fs_units)
    return rep
