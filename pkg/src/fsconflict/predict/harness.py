"""The seven-row comparison: three rule-based baselines and four models."""
from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from ..ingest import Period
from .baselines import BASELINES, NotPredictable
from .features import (
    CONFLICT_FEATURES,
    FeatureConfig,
    build_dataset,
    class_weights,
    default_cutoff,
    sample_weights,
    temporal_split,
)
from .forest import ForestConfig, train_forest
from .logistic import LogisticConfig, train_logistic
from .metrics import MetricsReport, evaluate, feature_importance

TABLE_COLUMNS = ("Type", "Index", "Model", "Test Accuracy", "Test Precision", "Test Recall", "F1")


@dataclass
class Row:
    type: str
    index: int
    model: str
    metrics: MetricsReport
    coverage: float  # share of test examples the model could score


@dataclass
class RunResult:
    rows: list[Row]
    importance: dict[str, list[tuple[str, float]]]
    cutoff: Period
    n_train: int
    n_test: int
    features: dict[str, list[str]]
    class_weights: dict[int, float]
    models: dict = field(default_factory=dict)
    predictions: dict = field(default_factory=dict)

    def row(self, name: str) -> Row:
        for r in self.rows:
            if r.model == name:
                return r
        raise KeyError(name)


def _model_label(kind: str, with_conflict: bool, fc: ForestConfig) -> str:
    suffix = "with conflict features" if with_conflict else "CHS"
    if kind == "logistic":
        return f"Logistic regression (balanced), {suffix}"
    return f"Random forest (balanced, {fc.n_trees} trees, seed {fc.seed}), {suffix}"


def run_models(fused, cutoff: Period | None = None, test_frac: float = 0.2,
               features: FeatureConfig = FeatureConfig(), logistic: LogisticConfig = LogisticConfig(),
               forest: ForestConfig = ForestConfig(), models=("logistic", "forest"),
               keep_models: bool = False) -> RunResult:
    full = build_dataset(fused, with_conflict=True, config=features)
    if cutoff is None:
        cutoff = default_cutoff(full.periods, test_frac)
    train_c, test_c = temporal_split(full, cutoff)
    train_h, test_h = train_c.drop_features(CONFLICT_FEATURES), test_c.drop_features(CONFLICT_FEATURES)
    cw = class_weights(train_c.y)
    sw = sample_weights(train_c.y, cw)

    rows = []
    preds = {}
    for i, (name, fn) in enumerate(BASELINES.items(), start=1):
        p, t = [], []
        for hist, per, lab in zip(test_c.histories, test_c.periods, test_c.y):
            try:
                p.append(fn(hist, per))
            except NotPredictable:
                continue
            t.append(int(lab))
        rows.append(Row("Rule-based", i, name, evaluate(p, t), len(t) / len(test_c)))
        preds[name] = p

    importance = {}
    fitted = {}
    idx = 4
    order = [(k, False) for k in ("logistic", "forest")] + [(k, True) for k in ("logistic", "forest")]
    for kind, with_c in order:
        if kind not in models:
            continue
        tr, te = (train_c, test_c) if with_c else (train_h, test_h)
        if kind == "logistic":
            m = train_logistic(tr.X, tr.y, sw, logistic, tr.feature_names, cw)
        else:
            m = train_forest(tr.X, tr.y, sw, forest, tr.feature_names, cw)
        label = _model_label(kind, with_c, forest)
        yhat = m.predict(te.X)
        rows.append(Row("ML-based", idx, label, evaluate(yhat, te.y), 1.0))
        importance[label] = feature_importance(m)
        preds[label] = yhat
        if keep_models:
            fitted[label] = m
        idx += 1
    return RunResult(rows, importance, cutoff, len(train_c), len(test_c),
                     {"CHS": train_h.feature_names, "conflict": train_c.feature_names}, cw,
                     fitted, preds)


def _fmt(v: float) -> str:
    return f"{v:.6f}"


def write_table(result: RunResult, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(TABLE_COLUMNS)
        for r in result.rows:
            m = r.metrics
            w.writerow([r.type, r.index, r.model, _fmt(m.accuracy), _fmt(m.precision_weighted),
                        _fmt(m.recall_weighted), _fmt(m.f1_weighted)])


def write_importance(result: RunResult, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["model", "rank", "feature", "score"])
        for label, pairs in result.importance.items():
            for rank, (name, score) in enumerate(pairs, start=1):
                w.writerow([label, rank, name, repr(score)])


def manifest(result: RunResult, seed: int, extra: dict | None = None) -> dict:
    out = {
        "seed": seed,
        "split_cutoff": str(result.cutoff),
        "n_train": result.n_train,
        "n_test": result.n_test,
        "features": result.features,
        "class_weights": {str(k): v for k, v in sorted(result.class_weights.items())},
        "coverage": {r.model: r.coverage for r in result.rows},
        "test_counts": {r.model: r.metrics.n for r in result.rows},
    }
    if extra:
        out.update(extra)
    return out


def write_manifest(data: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=1, sort_keys=True)
        f.write("\n")
