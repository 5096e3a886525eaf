from .core import (
    AdminUnit,
    ConflictAggregate,
    FSRecord,
    FusedRecord,
    JoinReport,
    aggregate_conflicts,
    dedup_worst,
    join_report,
    lag_join,
    lag_window,
    overlay,
    rolling_24m,
    rolling_window,
    window_totals,
)
from .table import CANONICAL_COLUMNS, read_fused_csv, type_column, write_fused_csv
