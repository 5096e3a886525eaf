"""Synthetic world with a planted conflict -> food-security coupling.

Randomness is drawn from Philox counter-based streams keyed by
(seed, purpose, ...), so e.g. adding districts or changing the phase model
never shifts the conflict draws of existing districts.
"""
from __future__ import annotations

import calendar
import datetime as dt
import json
import math
import os
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ..geom import MultiPolygon, Polygon, Ring, dissolve, rect
from ..ingest import EVENT_TYPES, ConflictEvent, Feature, GeoLayer, Period, normalize_name, serialize_acled
from .shpwrite import write_layer

GEOMETRY, HOT, CONFLICT, PHASE, JITTER, NAMES = range(6)

TYPE_PROBS = (0.25, 0.12, 0.28, 0.1, 0.1, 0.15)
COUNTRY_NAMES = (
    "Ardelia", "Bérundi", "Calvora", "Dunmark", "Estrène",
    "Folvania", "Gaskoné", "Halvéa", "Istoria", "Jorvané",
)
INITIAL_PHASE_P = (0.35, 0.35, 0.2, 0.1, 0.0)


def stream(seed: int, purpose: int, *sub: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(purpose,) + tuple(sub))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    n_countries: int = 3
    regions_per_country: int = 3
    districts_per_region: int = 4
    n_years: int = 6
    start_year: int = 2016
    base_conflict_rate: float = 1.0
    burst_prob: float = 0.08
    burst_multiplier: float = 8.0
    coupling_beta: float = 2.0
    phase_persistence: float = 0.2
    # intercept of the escalation logit
    escalation_alpha: float = 0.0
    hot_fraction: float = 0.25
    # burst probability of non-hot districts, relative to burst_prob
    cold_burst_scale: float = 0.0
    max_burst_months: int = 2
    fatality_p: float = 0.4
    fs_jitter: float = 1e-5

    def __post_init__(self):
        for name in ("n_countries", "regions_per_country", "districts_per_region"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.n_years < 2:
            raise ValueError("n_years must be >= 2")
        for name in ("burst_prob", "phase_persistence", "hot_fraction", "cold_burst_scale"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if not (math.isfinite(self.base_conflict_rate) and self.base_conflict_rate >= 0):
            raise ValueError("base_conflict_rate must be finite and >= 0")
        if not (math.isfinite(self.burst_multiplier) and self.burst_multiplier >= 1):
            raise ValueError("burst_multiplier must be >= 1")
        if not math.isfinite(self.coupling_beta):
            raise ValueError("coupling_beta must be finite")
        if not 0 <= self.fs_jitter < 1e-3:
            raise ValueError("fs_jitter must be in [0, 0.001)")
        if self.max_burst_months < 1:
            raise ValueError("max_burst_months must be >= 1")

    @property
    def n_districts(self) -> int:
        return self.n_countries * self.regions_per_country * self.districts_per_region

    @property
    def periods(self) -> list[Period]:
        first = Period(self.start_year, 2)
        return [first.shift(i) for i in range(3 * self.n_years)]

    @property
    def n_months(self) -> int:
        return 12 * self.n_years


@dataclass(frozen=True)
class District:
    index: int
    country: str
    admin1: str
    admin2: str
    bounds: tuple[float, float, float, float]
    hot: bool

    @property
    def key(self) -> str:
        return "/".join(normalize_name(s) for s in (self.country, self.admin1, self.admin2))

    @property
    def geometry(self) -> MultiPolygon:
        return MultiPolygon((rect(*self.bounds),))


def _country_name(i: int) -> str:
    return COUNTRY_NAMES[i] if i < len(COUNTRY_NAMES) else f"Country {i + 1}"


def gen_admin_grid(config: SynthConfig) -> tuple[GeoLayer, list[District]]:
    """Rectangular districts tiling one block per country.

    Each region is a 1-degree-tall row of its country block; district
    widths within a row vary but always sum to the block width.
    """
    rng = stream(config.seed, GEOMETRY)
    n_hot = max(1, round(config.hot_fraction * config.n_districts)) if config.hot_fraction > 0 else 0
    hot = set(stream(config.seed, HOT).permutation(config.n_districts)[:n_hot].tolist())
    width = float(config.districts_per_region)
    height = float(config.regions_per_country)
    per_row = max(1, int(300 // (width + 1)))
    districts = []
    for c in range(config.n_countries):
        cname = _country_name(c)
        x0 = -150.0 + (c % per_row) * (width + 1)
        y0 = -60.0 + (c // per_row) * (height + 1)
        for r in range(config.regions_per_country):
            rname = f"Région {r + 1}"
            w = 0.6 + 0.8 * rng.random(config.districts_per_region)
            cuts = np.concatenate([[0.0], np.cumsum(w / w.sum() * width)])
            cuts = np.round(cuts, 4)
            cuts[-1] = width
            for d in range(config.districts_per_region):
                idx = len(districts)
                bounds = (x0 + float(cuts[d]), y0 + r, x0 + float(cuts[d + 1]), y0 + r + 1.0)
                dname = f"{cname[:3]} Département {r + 1}-{d + 1}"
                districts.append(District(idx, cname, rname, dname, bounds, idx in hot))
    layer = GeoLayer(tuple(
        Feature(d.geometry, {"ADMIN0": d.country, "ADMIN1": d.admin1, "ADMIN2": d.admin2})
        for d in districts
    ))
    return layer, districts


@dataclass
class ConflictHistory:
    events: list[ConflictEvent]
    monthly: np.ndarray  # districts x months event counts
    burst: np.ndarray  # districts x months, True while a burst is active


def gen_conflicts(config: SynthConfig, registry: list[District]) -> ConflictHistory:
    nm = config.n_months
    monthly = np.zeros((len(registry), nm), dtype=np.int64)
    burst = np.zeros((len(registry), nm), dtype=bool)
    events = []
    months = [(config.start_year + m // 12, m % 12 + 1) for m in range(nm)]
    for d in registry:
        rng = stream(config.seed, CONFLICT, d.index)
        p_start = config.burst_prob * (1.0 if d.hot else config.cold_burst_scale)
        left = 0
        starts = rng.random(nm)
        lengths = rng.integers(1, config.max_burst_months + 1, size=nm)
        for m in range(nm):
            if left == 0 and starts[m] < p_start:
                left = int(lengths[m])
            rate = config.base_conflict_rate
            if left:
                burst[d.index, m] = True
                rate *= config.burst_multiplier
                left -= 1
            k = int(rng.poisson(rate)) if rate > 0 else 0
            monthly[d.index, m] = k
            if not k:
                continue
            y, mo = months[m]
            ndays = calendar.monthrange(y, mo)[1]
            days = rng.integers(1, ndays + 1, size=k)
            types = rng.choice(len(EVENT_TYPES), size=k, p=TYPE_PROBS)
            fats = rng.geometric(config.fatality_p, size=k) - 1
            x0, y0, x1, y1 = d.bounds
            lons = np.round(x0 + (x1 - x0) * rng.random(k), 4)
            lats = np.round(y0 + (y1 - y0) * rng.random(k), 4)
            for j in range(k):
                events.append(ConflictEvent(
                    dt.date(y, mo, int(days[j])), EVENT_TYPES[types[j]],
                    d.country, d.admin1, d.admin2,
                    float(lats[j]), float(lons[j]), int(fats[j]),
                ))
    events.sort(key=lambda e: (e.event_date, e.country, e.admin1, e.admin2, e.event_type,
                               e.latitude, e.longitude, e.fatalities))
    return ConflictHistory(events, monthly, burst)


def lag_counts(config: SynthConfig, monthly: np.ndarray, lag: int = 3) -> np.ndarray:
    """Per district and period, events in the ``lag`` months before the period
    month; months before the simulated span count as zero."""
    out = np.zeros((monthly.shape[0], 3 * config.n_years), dtype=np.int64)
    for t, p in enumerate(config.periods):
        m = (p.year - config.start_year) * 12 + p.month - 1
        lo = max(0, m - lag)
        out[:, t] = monthly[:, lo:m].sum(axis=1)
    return out


def gen_phases(config: SynthConfig, registry: list[District], history: ConflictHistory) -> np.ndarray:
    """Markov phase chain per district, districts x periods, values 1..5."""
    lag3 = lag_counts(config, history.monthly).astype(float)
    # excess over the background Poisson rate, in background standard deviations
    lam = 3.0 * config.base_conflict_rate
    z = (lag3 - lam) / math.sqrt(lam) if lam > 0 else np.zeros_like(lag3)
    n_per = lag3.shape[1]
    phases = np.zeros((len(registry), n_per), dtype=np.int64)
    for d in registry:
        rng = stream(config.seed, PHASE, d.index)
        ph = int(rng.choice(5, p=INITIAL_PHASE_P)) + 1
        phases[d.index, 0] = ph
        u = rng.random((n_per, 2))
        for t in range(1, n_per):
            esc = 1.0 / (1.0 + math.exp(-(config.escalation_alpha + config.coupling_beta * z[d.index, t])))
            if u[t, 0] < esc:
                ph = min(5, ph + 1)
            else:
                # keep a `persistence` share of the excess over phase 1,
                # rounded stochastically
                ph = 1 + int(math.floor(config.phase_persistence * (ph - 1) + u[t, 1]))
            phases[d.index, t] = ph
    return phases


def _translate(m: MultiPolygon, dx: float, dy: float) -> MultiPolygon:
    def mv(r: Ring) -> Ring:
        return Ring(tuple((x + dx, y + dy) for x, y in r.coords))

    return MultiPolygon(tuple(Polygon(mv(p.outer), tuple(mv(h) for h in p.holes)) for p in m.parts))


def gen_fs(config: SynthConfig, registry: list[District], phases: np.ndarray) -> dict[Period, GeoLayer]:
    """One layer per period: per country, the union of same-phase districts,
    shifted by a sub-sliver jitter."""
    by_country: dict[str, list[District]] = {}
    for d in registry:
        by_country.setdefault(d.country, []).append(d)
    layers = {}
    for t, p in enumerate(config.periods):
        feats = []
        for ci, (cname, ds) in enumerate(by_country.items()):
            for ph in range(1, 6):
                members = [d for d in ds if phases[d.index, t] == ph]
                if not members:
                    continue
                geom = dissolve([d.geometry for d in members])
                if config.fs_jitter > 0:
                    dx, dy = stream(config.seed, JITTER, t, ci, ph).uniform(-config.fs_jitter, config.fs_jitter, 2)
                    geom = _translate(geom, float(dx), float(dy))
                feats.append(Feature(geom, {"CS": ph}))
        layers[p] = GeoLayer(tuple(feats))
    return layers


@dataclass
class SynthWorld:
    config: SynthConfig
    admin: GeoLayer
    registry: list[District]
    conflicts: ConflictHistory
    phases: np.ndarray
    fs: dict[Period, GeoLayer]

    @property
    def periods(self) -> list[Period]:
        return self.config.periods

    def truth(self) -> dict:
        months = [f"{self.config.start_year + m // 12:04d}{m % 12 + 1:02d}" for m in range(self.config.n_months)]
        return {
            "config": asdict(self.config),
            "periods": [str(p) for p in self.periods],
            "conflict_months": [months[0], months[-1]],
            # the first period's lag window reaches before the simulated span
            "expected_fused_rows": len(self.registry) * (len(self.periods) - 1),
            "districts": [
                {
                    "key": d.key,
                    "hot": d.hot,
                    "burst_months": sum(int(b) for b in self.conflicts.burst[d.index]),
                    "events": int(self.conflicts.monthly[d.index].sum()),
                    "phases": [int(v) for v in self.phases[d.index]],
                }
                for d in self.registry
            ],
        }


def generate(config: SynthConfig, with_fs: bool = True) -> SynthWorld:
    admin, registry = gen_admin_grid(config)
    hist = gen_conflicts(config, registry)
    phases = gen_phases(config, registry, hist)
    fs = gen_fs(config, registry, phases) if with_fs else {}
    return SynthWorld(config, admin, registry, hist, phases, fs)


def _acled_name(s: str, style: int) -> str:
    # conflict data spells names differently than the boundary files
    if style == 1:
        return s.upper()
    if style == 2:
        return "  " + s.replace(" ", "  ") + " "
    return s


def write_dataset(world: SynthWorld, out_dir) -> Path:
    out = Path(out_dir)
    (out / "fs").mkdir(parents=True, exist_ok=True)
    reg = world.registry
    write_layer(out / "admin", [f.geometry for f in world.admin],
                [f.attributes for f in world.admin], ["ADMIN0", "ADMIN1", "ADMIN2"])
    for p, layer in world.fs.items():
        write_layer(out / "fs" / f"cs_{p}", [f.geometry for f in layer],
                    [f.attributes for f in layer], ["CS"])
    styles = stream(world.config.seed, NAMES).integers(0, 3, size=world.config.n_countries)
    cidx = {name: i for i, name in enumerate(dict.fromkeys(d.country for d in reg))}
    events = [
        ConflictEvent(e.event_date, e.event_type,
                      *(_acled_name(s, int(styles[cidx[e.country]])) for s in (e.country, e.admin1, e.admin2)),
                      e.latitude, e.longitude, e.fatalities)
        for e in world.conflicts.events
    ]
    with open(out / "acled.csv", "w", newline="", encoding="utf-8") as f:
        f.write(serialize_acled(events))
    with open(out / "truth.json", "w", encoding="utf-8") as f:
        json.dump(world.truth(), f, indent=1, sort_keys=True, ensure_ascii=False)
        f.write("\n")
    return out


def planted_config(seed: int = 0, beta: float = 2.0, **overrides) -> SynthConfig:
    """Larger, longer world used for the recovery and uplift experiments."""
    kw = dict(seed=seed, n_countries=6, n_years=10, coupling_beta=beta)
    kw.update(overrides)
    return SynthConfig(**kw)


def burst_heavy_config(seed: int = 0, beta: float = 2.0, **overrides) -> SynthConfig:
    """Planted world with hot districts bursting roughly twice as often."""
    kw = dict(burst_prob=0.15)
    kw.update(overrides)
    return planted_config(seed, beta, **kw)
