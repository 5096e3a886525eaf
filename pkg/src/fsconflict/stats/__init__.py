from .levels import (
    CorrelationResult,
    Level,
    aggregate_level,
    correlate,
    read_correlations_csv,
    to_geojson,
    unit_key,
    write_correlations_csv,
    write_geojson,
)
from .spearman import InsufficientData, SeriesPair, Undefined, p_value, permutation_p, ranks, spearman
