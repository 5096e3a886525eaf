"""Support-weighted classification metrics and feature importance."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PHASES = (1, 2, 3, 4, 5)


class EvalError(ValueError):
    pass


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision_weighted: float
    recall_weighted: float
    f1_weighted: float
    confusion: np.ndarray  # rows true phase, columns predicted phase
    n: int


def evaluate(predictions, labels, classes=PHASES) -> MetricsReport:
    pred = np.asarray(predictions)
    true = np.asarray(labels)
    if pred.shape != true.shape:
        raise EvalError(f"length mismatch: {pred.shape} vs {true.shape}")
    if true.size == 0:
        raise EvalError("nothing to evaluate")
    classes = list(classes)
    pos = {c: i for i, c in enumerate(classes)}
    if any(int(v) not in pos for v in np.r_[pred, true]):
        raise EvalError("label outside the class set")
    k = len(classes)
    cm = np.zeros((k, k), dtype=np.int64)
    np.add.at(cm, (np.vectorize(pos.get)(true), np.vectorize(pos.get)(pred)), 1)
    n = int(true.size)
    tp = np.diag(cm).astype(float)
    support = cm.sum(axis=1).astype(float)
    predicted = cm.sum(axis=0).astype(float)
    prec = np.divide(tp, predicted, out=np.zeros(k), where=predicted > 0)
    rec = np.divide(tp, support, out=np.zeros(k), where=support > 0)
    f1 = np.divide(2 * prec * rec, prec + rec, out=np.zeros(k), where=(prec + rec) > 0)
    wts = support / n
    acc = float(tp.sum()) / n
    # sum_c (n_c/n)(tp_c/n_c) reduces to sum(tp)/n; computed that way it
    # equals accuracy exactly instead of up to rounding
    recall_w = float(tp.sum()) / n
    return MetricsReport(acc, float(wts @ prec), recall_w, float(wts @ f1), cm, n)


def feature_importance(model, feature_names=None) -> list[tuple[str, float]]:
    """Logistic: mean |standardized coefficient| across classes.
    Forest: Gini decrease, normalized to sum 1. Sorted descending, ties by name."""
    names = list(feature_names or model.feature_names)
    if model.kind == "logistic":
        scores = np.abs(model.W).mean(axis=0)
    elif model.kind == "forest":
        scores = model.raw_importance()
    else:
        raise ValueError(f"unknown model kind {model.kind!r}")
    pairs = [(n, float(s)) for n, s in zip(names, scores)]
    pairs.sort(key=lambda t: (-t[1], t[0]))
    return pairs
