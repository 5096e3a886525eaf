"""Dataset loading and the end-to-end fusion step shared by the CLI and scripts."""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path

from .fuse import (
    FusedRecord,
    JoinReport,
    aggregate_conflicts,
    dedup_worst,
    join_report,
    lag_join,
    lag_window,
    overlay,
)
from .ingest import ConflictEvent, GeoLayer, Period, read_acled, read_layer, year_month_of

log = logging.getLogger(__name__)

_FS_NAME = re.compile(r"^cs_(\d{6})\.shp$", re.IGNORECASE)


@dataclass
class Dataset:
    admin: GeoLayer
    fs: dict[Period, GeoLayer]
    events: list[ConflictEvent]
    skipped_rows: int = 0


def load_dataset(admin_path, fs_dir, conflict_csv, encoding: str = "latin-1") -> Dataset:
    fs_dir = Path(fs_dir)
    if not fs_dir.is_dir():
        raise FileNotFoundError(f"FS directory not found: {fs_dir}")
    fs = {}
    for p in sorted(fs_dir.iterdir()):
        m = _FS_NAME.match(p.name)
        if m:
            fs[Period.parse(m.group(1))] = read_layer(p, encoding)
    if not fs:
        raise FileNotFoundError(f"no cs_YYYYMM.shp layers in {fs_dir}")
    errors: list = []
    events = read_acled(conflict_csv, errors=errors)
    return Dataset(read_layer(admin_path, encoding), fs, events, len(errors))


def fuse_dataset(ds: Dataset, sliver_threshold: float = 0.005, lag_months: int = 3,
                 cumulative_window: int = 24, require_full_lag: bool = True
                 ) -> tuple[list[FusedRecord], JoinReport]:
    """Steps 1-3. With ``require_full_lag`` periods whose lag window starts
    before the first conflict month are left out."""
    records = []
    for period, layer in sorted(ds.fs.items()):
        records.extend(overlay(layer, ds.admin, sliver_threshold, period=period))
    fs = dedup_worst(records)
    aggs = aggregate_conflicts(ds.events)
    if require_full_lag and ds.events:
        first = min(year_month_of(e.event_date) for e in ds.events)
        before = len(fs)
        fs = [r for r in fs if lag_window(r.period, lag_months)[0] >= first]
        log.info("event=fuse periods_without_full_lag_dropped_rows=%d", before - len(fs))
    report = join_report(fs, aggs)
    return lag_join(fs, aggs, lag_months, cumulative_window), report
