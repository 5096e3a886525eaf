from .acled import (
    EVENT_TYPES,
    ConflictEvent,
    RowError,
    SchemaError,
    parse_acled,
    read_acled,
    serialize_acled,
)
from .names import normalize_name
from .periods import PUBLICATION_MONTHS, Period, YearMonth, period_range, year_month_of
from .shapefile import (
    CorruptPair,
    Feature,
    GeoLayer,
    NotAShapefile,
    ShapefileError,
    TruncatedFile,
    UnsupportedShapeType,
    parse_dbf,
    parse_shapefile,
    parse_shp,
    read_layer,
)
