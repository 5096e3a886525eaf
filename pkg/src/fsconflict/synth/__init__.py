from .shpwrite import write_dbf, write_layer, write_shp
from .world import (
    ConflictHistory,
    District,
    SynthConfig,
    SynthWorld,
    gen_admin_grid,
    gen_conflicts,
    gen_fs,
    gen_phases,
    generate,
    lag_counts,
    planted_config,
    burst_heavy_config,
    stream,
    write_dataset,
)
