"""Country / region / district series and per-unit correlation."""
from __future__ import annotations

import csv
import json
import logging
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from .spearman import SeriesPair, Undefined, p_value, permutation_p, spearman

log = logging.getLogger(__name__)

LOW_CONFIDENCE_N = 5


class Level(str, Enum):
    COUNTRY = "country"
    REGION = "region"
    DISTRICT = "district"


def unit_key(unit, level: Level | str) -> str:
    level = Level(level)
    if level is Level.COUNTRY:
        return unit.country
    if level is Level.REGION:
        return f"{unit.country}/{unit.admin1}"
    return f"{unit.country}/{unit.admin1}/{unit.admin2}"


@dataclass(frozen=True)
class CorrelationResult:
    unit_key: str
    level: str
    rho: float
    p_value: float
    n: int
    low_confidence: bool = False


def _conflict_value(rec, event_type):
    return rec.lag3_conflicts if event_type is None else rec.lag3_by_type[event_type]


def aggregate_level(fused: Iterable, level: Level | str, event_type: str | None = None) -> dict[str, SeriesPair]:
    """Per unit: x = lagged conflicts, y = phase, aligned by period.

    Above district level, conflicts are summed over member districts and
    phase is the area-weighted mean of district phases. Districts with zero
    area get equal weight if the whole group has zero area.
    """
    level = Level(level)
    conf: dict = defaultdict(float)
    wsum: dict = defaultdict(float)
    wphase: dict = defaultdict(float)
    cnt: dict = defaultdict(int)
    psum: dict = defaultdict(float)
    for r in fused:
        k = (unit_key(r.unit, level), r.period)
        conf[k] += _conflict_value(r, event_type)
        wsum[k] += r.area
        wphase[k] += r.area * r.phase
        cnt[k] += 1
        psum[k] += r.phase
    series: dict[str, list] = defaultdict(list)
    for (u, p) in sorted(conf):
        k = (u, p)
        if level is Level.DISTRICT and cnt[k] == 1:
            y = float(psum[k])
        elif wsum[k] > 0:
            y = wphase[k] / wsum[k]
        else:
            y = psum[k] / cnt[k]
        series[u].append((p, conf[k], y))
    return {
        u: SeriesPair([c for _, c, _ in rows], [y for _, _, y in rows], [p for p, _, _ in rows])
        for u, rows in series.items()
    }


def correlate(
    fused: Iterable,
    level: Level | str,
    alpha: float = 0.05,
    include_all: bool = False,
    method: str = "t",
    n_perm: int = 10_000,
    seed: int = 0,
    event_type: str | None = None,
) -> list[CorrelationResult]:
    """Spearman rho and p per unit, sorted by unit key.

    Only p < alpha is kept unless ``include_all``; alpha >= 1 keeps every
    defined result. Undefined units (constant series, n < 3) are dropped
    and counted in the log.
    """
    level = Level(level)
    out = []
    undefined = 0
    for key, pair in sorted(aggregate_level(fused, level, event_type).items()):
        n = len(pair)
        try:
            if n < 3:
                raise Undefined("n < 3")
            rho = spearman(pair)
        except Undefined:
            undefined += 1
            continue
        if method == "t":
            p = p_value(rho, n)
        elif method == "permutation":
            p = permutation_p(pair.x, pair.y, n_perm, seed)
        else:
            raise ValueError(f"unknown method {method!r}")
        if include_all or alpha >= 1.0 or p < alpha:
            out.append(CorrelationResult(key, level.value, rho, p, n, n < LOW_CONFIDENCE_N))
    if undefined:
        log.info("event=correlate level=%s undefined_units=%d", level.value, undefined)
    return out


CSV_COLUMNS = ("unit_key", "level", "rho", "p_value", "n", "low_confidence")


def write_correlations_csv(results: Iterable[CorrelationResult], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in results:
            w.writerow([r.unit_key, r.level, repr(r.rho), repr(r.p_value), r.n, int(r.low_confidence)])


def read_correlations_csv(path) -> list[CorrelationResult]:
    with open(path, newline="", encoding="utf-8") as f:
        return [
            CorrelationResult(row["unit_key"], row["level"], float(row["rho"]), float(row["p_value"]),
                              int(row["n"]), row.get("low_confidence") == "1")
            for row in csv.DictReader(f)
        ]


def _geojson_geometry(m) -> dict:
    polys = [[list(map(list, p.outer.coords))] + [list(map(list, h.coords)) for h in p.holes] for p in m.parts]
    return {"type": "MultiPolygon", "coordinates": polys}


def to_geojson(results: Iterable[CorrelationResult], geometries: Mapping[str, object]) -> dict:
    feats = []
    for r in results:
        g = geometries.get(r.unit_key)
        feats.append({
            "type": "Feature",
            "properties": {"unit_key": r.unit_key, "level": r.level, "rho": r.rho,
                           "p_value": r.p_value, "n": r.n, "low_confidence": r.low_confidence},
            "geometry": _geojson_geometry(g) if g is not None else None,
        })
    return {"type": "FeatureCollection", "features": feats}


def write_geojson(results, geometries, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(to_geojson(results, geometries), f, ensure_ascii=False)
        f.write("\n")
