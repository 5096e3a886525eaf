"""Multinomial logistic regression, full-batch gradient descent.

Objective: class-weighted mean cross-entropy + (l2 / 2) * ||W||^2 over
standardized features. The intercept is not penalized. Using the weighted
mean makes the fit invariant to duplicating every training row.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class DegenerateTraining(ValueError):
    pass


@dataclass(frozen=True)
class LogisticConfig:
    l2: float = 1.0
    tol: float = 1e-8
    max_iter: int = 10_000
    # Armijo sufficient-decrease constant
    armijo: float = 1e-4


@dataclass
class LogisticModel:
    classes: np.ndarray
    W: np.ndarray  # classes x features, on the standardized scale
    b: np.ndarray
    mean: np.ndarray
    scale: np.ndarray
    feature_names: list[str] = field(default_factory=list)
    loss_history: list[float] = field(default_factory=list)
    class_weights: dict = field(default_factory=dict)
    converged: bool = False
    kind: str = "logistic"

    def decision_function(self, X) -> np.ndarray:
        Z = (np.asarray(X, dtype=float) - self.mean) / self.scale
        return Z @ self.W.T + self.b

    def predict_proba(self, X) -> np.ndarray:
        return _softmax(self.decision_function(X))

    def predict(self, X) -> np.ndarray:
        return self.classes[np.argmax(self.decision_function(X), axis=1)]


def _softmax(S):
    S = S - S.max(axis=1, keepdims=True)
    E = np.exp(S)
    return E / E.sum(axis=1, keepdims=True)


def standardizer(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Zero-mean unit-variance for non-binary columns; binary ones untouched."""
    mean = np.zeros(X.shape[1])
    scale = np.ones(X.shape[1])
    for j in range(X.shape[1]):
        col = X[:, j]
        if np.all((col == 0) | (col == 1)):
            continue
        sd = col.std()
        mean[j] = col.mean()
        if sd > 0:
            scale[j] = sd
    return mean, scale


def loss_and_grad(W, b, Z, Y, w, l2):
    """Objective and gradients. Z standardized inputs, Y one-hot, w sample weights."""
    S = Z @ W.T + b
    S = S - S.max(axis=1, keepdims=True)
    logZ = np.log(np.exp(S).sum(axis=1))
    ll = (S * Y).sum(axis=1) - logZ
    wsum = w.sum()
    loss = -(w @ ll) / wsum + 0.5 * l2 * float((W * W).sum())
    P = np.exp(S - logZ[:, None])
    R = (P - Y) * (w / wsum)[:, None]
    gW = R.T @ Z + l2 * W
    gb = R.sum(axis=0)
    return loss, gW, gb


def train_logistic(X, y, sample_weight=None, config: LogisticConfig = LogisticConfig(),
                   feature_names=None, class_weights=None) -> LogisticModel:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    classes = np.unique(y)
    if classes.size < 2:
        raise DegenerateTraining("need at least two classes")
    w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, dtype=float)
    mean, scale = standardizer(X)
    Z = (X - mean) / scale
    Y = (y[:, None] == classes[None, :]).astype(float)
    K, d = classes.size, X.shape[1]
    W = np.zeros((K, d))
    b = np.zeros(K)
    loss, gW, gb = loss_and_grad(W, b, Z, Y, w, config.l2)
    history = [loss]
    step = 1.0
    converged = False
    for _ in range(config.max_iter):
        g2 = float((gW * gW).sum() + (gb * gb).sum())
        if np.sqrt(g2) <= config.tol:
            converged = True
            break
        while True:
            W1, b1 = W - step * gW, b - step * gb
            l1, gW1, gb1 = loss_and_grad(W1, b1, Z, Y, w, config.l2)
            need = config.armijo * step * g2
            # once the required decrease is below float resolution of the
            # loss, accept any step that does not increase it
            if l1 <= loss - need or (need < 1e-15 * abs(loss) and l1 <= loss):
                break
            step *= 0.5
            if step < 1e-20:
                break
        if step < 1e-20:
            break
        # Barzilai-Borwein trial step for the next iteration
        dW, db = W1 - W, b1 - b
        yW, yb = gW1 - gW, gb1 - gb
        sy = float((dW * yW).sum() + (db * yb).sum())
        ss = float((dW * dW).sum() + (db * db).sum())
        step = ss / sy if sy > 0 else step * 2.0
        W, b, loss, gW, gb = W1, b1, l1, gW1, gb1
        history.append(loss)
    return LogisticModel(classes, W, b, mean, scale, list(feature_names or []), history,
                         dict(class_weights or {}), converged)
