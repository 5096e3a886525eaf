"""Example construction (CHS and conflict-augmented) and the temporal split."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from ..ingest import Period
from .baselines import count_transitions

CONFLICT_FEATURES = ("lag3_conflicts", "lag3_fatalities", "cum24_conflicts", "cum24_fatalities")


class SplitError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureConfig:
    n_lags: int = 3
    crisis_threshold: int = 3
    # impute missing lags with the unit's earliest phase (plus indicator);
    # False drops such examples instead
    impute: bool = True


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    feature_names: list[str]
    units: list = field(default_factory=list)
    periods: list[Period] = field(default_factory=list)
    # per-example phase history strictly before the example's period
    histories: list[dict] = field(default_factory=list)

    def __len__(self):
        return len(self.y)

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx, dtype=int)
        return Dataset(self.X[idx], self.y[idx], list(self.feature_names),
                       [self.units[i] for i in idx], [self.periods[i] for i in idx],
                       [self.histories[i] for i in idx])

    def drop_features(self, names: Iterable[str]) -> "Dataset":
        names = set(names)
        keep = [i for i, n in enumerate(self.feature_names) if n not in names]
        return replace(self, X=self.X[:, keep], feature_names=[self.feature_names[i] for i in keep])

    def examples(self):
        for i in range(len(self)):
            yield LabeledExample(dict(zip(self.feature_names, self.X[i].tolist())),
                                 int(self.y[i]), self.units[i], self.periods[i])


@dataclass(frozen=True)
class LabeledExample:
    features: dict
    label: int
    unit: object
    period: Period


def _region(unit) -> str:
    return f"{unit.country}/{unit.admin1}"


def build_dataset(fused: Sequence, with_conflict: bool, config: FeatureConfig = FeatureConfig()) -> Dataset:
    """One example per (unit, period) that has a previous observed period.

    Lags count publication periods back through the unit's observed
    series. SPLY is the phase at the same month a year earlier.
    """
    by_unit: dict = defaultdict(list)
    for r in fused:
        by_unit[r.unit].append(r)
    regions = sorted({_region(u) for u in by_unit})
    lag_names = [f"cs_lag{k}" for k in range(1, config.n_lags + 1)]
    names = [f"region={g}" for g in regions] + lag_names + ["sply", "transitions"]
    names += [f"{n}_imputed" for n in lag_names[1:]] + ["sply_imputed"]
    if with_conflict:
        names += list(CONFLICT_FEATURES)
    rindex = {g: i for i, g in enumerate(regions)}

    rows, labels, units, periods, hists = [], [], [], [], []
    for unit in sorted(by_unit):
        recs = sorted(by_unit[unit], key=lambda r: r.period)
        phase_at = {r.period: r.phase for r in recs}
        earliest = recs[0].phase
        for t in range(1, len(recs)):
            r = recs[t]
            past = [q.phase for q in recs[:t]]
            lags, imputed = [], []
            for k in range(1, config.n_lags + 1):
                if t - k >= 0:
                    lags.append(past[t - k])
                    imputed.append(0.0)
                else:
                    lags.append(earliest)
                    imputed.append(1.0)
            sly = phase_at.get(r.period.same_last_year())
            sply_imp = 0.0 if sly is not None else 1.0
            if sly is None:
                sly = earliest
            if not config.impute and (any(imputed) or sply_imp):
                continue
            onehot = [0.0] * len(regions)
            onehot[rindex[_region(unit)]] = 1.0
            row = onehot + [float(v) for v in lags] + [float(sly), float(count_transitions(past, config.crisis_threshold))]
            row += imputed[1:] + [sply_imp]
            if with_conflict:
                row += [float(r.lag3_conflicts), float(r.lag3_fatalities),
                        float(r.cum24_conflicts), float(r.cum24_fatalities)]
            rows.append(row)
            labels.append(r.phase)
            units.append(unit)
            periods.append(r.period)
            hists.append({q.period: q.phase for q in recs[:t]})
    X = np.asarray(rows, dtype=float).reshape(len(rows), len(names))
    return Dataset(X, np.asarray(labels, dtype=np.int64), names, units, periods, hists)


def default_cutoff(periods: Iterable[Period], test_frac: float = 0.2) -> Period:
    """First period of the last ``test_frac`` share of distinct periods."""
    ps = sorted(set(periods))
    if len(ps) < 2:
        raise SplitError("need at least two distinct periods")
    n_test = min(len(ps) - 1, max(1, round(test_frac * len(ps))))
    return ps[len(ps) - n_test]


def temporal_split(ds: Dataset, cutoff: Period) -> tuple[Dataset, Dataset]:
    train = [i for i, p in enumerate(ds.periods) if p < cutoff]
    test = [i for i, p in enumerate(ds.periods) if p >= cutoff]
    if not train or not test:
        raise SplitError(f"cutoff {cutoff} leaves an empty side ({len(train)} train, {len(test)} test)")
    return ds.subset(train), ds.subset(test)


def class_weights(labels) -> dict[int, float]:
    labels = np.asarray(labels)
    if labels.size == 0:
        raise ValueError("no labels")
    classes, counts = np.unique(labels, return_counts=True)
    n, k = labels.size, classes.size
    return {int(c): n / (k * int(m)) for c, m in zip(classes, counts)}


def sample_weights(labels, weights: dict[int, float]) -> np.ndarray:
    return np.array([weights[int(c)] for c in labels], dtype=float)
