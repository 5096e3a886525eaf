"""ACLED-style conflict event CSV reader and writer."""
from __future__ import annotations

import csv
import datetime as dt
import io
import logging
import math
from dataclasses import dataclass
from typing import Iterable, TextIO

from .periods import YearMonth, year_month_of

log = logging.getLogger(__name__)

EVENT_TYPES = (
    "Battles",
    "Explosions/Remote violence",
    "Protests",
    "Riots",
    "Strategic developments",
    "Violence against civilians",
)
REQUIRED = (
    "event_date", "event_type", "country", "admin1", "admin2",
    "latitude", "longitude", "fatalities",
)


class SchemaError(ValueError):
    pass


class RowError(ValueError):
    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row
        self.message = message


@dataclass(frozen=True)
class ConflictEvent:
    event_date: dt.date
    event_type: str
    country: str
    admin1: str
    admin2: str
    latitude: float
    longitude: float
    fatalities: int

    @property
    def ym(self) -> YearMonth:
        return year_month_of(self.event_date)


def _parse_row(rec: dict, rowno: int) -> ConflictEvent:
    try:
        date = dt.date.fromisoformat(rec["event_date"].strip())
    except ValueError:
        raise RowError(rowno, f"bad event_date {rec['event_date']!r}") from None
    etype = rec["event_type"].strip()
    if etype not in EVENT_TYPES:
        raise RowError(rowno, f"unknown event_type {etype!r}")
    try:
        lat = float(rec["latitude"])
        lon = float(rec["longitude"])
    except ValueError:
        raise RowError(rowno, "bad coordinates") from None
    if not (math.isfinite(lat) and math.isfinite(lon) and -90 <= lat <= 90 and -180 <= lon <= 180):
        raise RowError(rowno, f"coordinates out of range ({lat}, {lon})")
    try:
        fat = int(rec["fatalities"].strip())
    except ValueError:
        raise RowError(rowno, f"bad fatalities {rec['fatalities']!r}") from None
    if fat < 0:
        raise RowError(rowno, f"negative fatalities {fat}")
    return ConflictEvent(date, etype, rec["country"], rec["admin1"], rec["admin2"], lat, lon, fat)


def parse_acled(csv_text: str | TextIO, strict: bool = False, errors: list | None = None) -> list[ConflictEvent]:
    """Parse events. Row numbers count the header as row 1.

    Bad rows raise RowError when ``strict``; otherwise they are skipped,
    counted in the log and appended to ``errors`` if a list is given.
    """
    stream = io.StringIO(csv_text) if isinstance(csv_text, str) else csv_text
    reader = csv.DictReader(stream)
    header = reader.fieldnames or []
    missing = [c for c in REQUIRED if c not in header]
    if missing:
        raise SchemaError(f"missing required columns: {', '.join(missing)}")
    events = []
    skipped = 0
    for i, rec in enumerate(reader, start=2):
        if None in rec or any(rec[c] is None for c in REQUIRED):
            exc = RowError(i, "wrong number of fields")
        else:
            try:
                events.append(_parse_row(rec, i))
                continue
            except RowError as e:
                exc = e
        if strict:
            raise exc
        skipped += 1
        if errors is not None:
            errors.append(exc)
    if skipped:
        log.warning("event=acled rows_skipped=%d rows_kept=%d", skipped, len(events))
    return events


def serialize_acled(events: Iterable[ConflictEvent]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REQUIRED)
    for e in events:
        w.writerow([
            e.event_date.isoformat(), e.event_type, e.country, e.admin1, e.admin2,
            repr(e.latitude), repr(e.longitude), e.fatalities,
        ])
    return buf.getvalue()


def read_acled(path, strict: bool = False, errors: list | None = None) -> list[ConflictEvent]:
    with open(path, newline="", encoding="utf-8") as f:
        return parse_acled(f, strict=strict, errors=errors)
