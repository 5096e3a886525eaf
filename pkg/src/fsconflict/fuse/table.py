"""Fused table CSV serialization."""
from __future__ import annotations

import csv
import re

from ..ingest import EVENT_TYPES, Period
from .core import AdminUnit, FusedRecord


def type_column(event_type: str) -> str:
    return "lag3_" + re.sub(r"[^a-z0-9]+", "_", event_type.lower()).strip("_")


CANONICAL_COLUMNS = (
    ["country", "admin1", "admin2", "period", "phase", "lag3_conflicts", "lag3_fatalities"]
    + [type_column(t) for t in EVENT_TYPES]
    + ["cum24_conflicts", "cum24_fatalities"]
)
# not part of the canonical set; carried for area-weighted aggregation
EXTRA_COLUMNS = ["area"]


def write_fused_csv(records, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(CANONICAL_COLUMNS + EXTRA_COLUMNS)
        for r in records:
            w.writerow(
                [r.unit.country, r.unit.admin1, r.unit.admin2, str(r.period), r.phase,
                 r.lag3_conflicts, r.lag3_fatalities]
                + [r.lag3_by_type[t] for t in EVENT_TYPES]
                + [r.cum24_conflicts, r.cum24_fatalities, repr(float(r.area))]
            )


def read_fused_csv(path) -> list[FusedRecord]:
    out = []
    with open(path, newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            out.append(FusedRecord(
                unit=AdminUnit(row["country"], row["admin1"], row["admin2"]),
                period=Period.parse(row["period"]),
                phase=int(row["phase"]),
                lag3_conflicts=int(row["lag3_conflicts"]),
                lag3_fatalities=int(row["lag3_fatalities"]),
                lag3_by_type={t: int(row[type_column(t)]) for t in EVENT_TYPES},
                cum24_conflicts=int(row["cum24_conflicts"]),
                cum24_fatalities=int(row["cum24_fatalities"]),
                area=float(row.get("area") or 0.0),
            ))
    return out
