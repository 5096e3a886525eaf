"""Random forest of class-weighted Gini CART trees.

Tree growth is compiled with numba. Tree t draws all its randomness from
seed + t (bootstrap from a numpy Generator, feature order from a
splitmix64 stream seeded by that Generator), so trees can be built in any
order or in parallel with identical results.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .logistic import DegenerateTraining


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 200
    seed: int = 5
    # None -> ceil(sqrt(d))
    max_features: int | None = None
    min_samples_leaf: int = 1
    max_depth: int | None = None
    bootstrap: bool = True


@dataclass
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray  # weighted class histogram per node
    importance: np.ndarray  # weighted Gini decrease per feature

    @property
    def n_nodes(self) -> int:
        return len(self.feature)


@dataclass
class ForestModel:
    classes: np.ndarray
    trees: list[Tree]
    feature_names: list[str] = field(default_factory=list)
    class_weights: dict = field(default_factory=dict)
    config: ForestConfig = ForestConfig()
    kind: str = "forest"

    def tree_proba(self, X) -> np.ndarray:
        """trees x samples x classes leaf probabilities."""
        X = np.ascontiguousarray(X, dtype=np.float64)
        return np.stack([_tree_proba(X, t.feature, t.threshold, t.left, t.right, _normalize(t.value))
                         for t in self.trees])

    def predict_proba(self, X) -> np.ndarray:
        P = self.tree_proba(X)
        # summing sorted contributions makes the result independent of tree order
        return np.sort(P, axis=0).sum(axis=0) / len(self.trees)

    def predict(self, X) -> np.ndarray:
        return self.classes[np.argmax(self.predict_proba(X), axis=1)]

    def raw_importance(self) -> np.ndarray:
        imp = np.zeros(len(self.feature_names) or self.trees[0].importance.size)
        for t in self.trees:
            s = t.importance.sum()
            if s > 0:
                imp += t.importance / s
        total = imp.sum()
        return imp / total if total > 0 else imp


def _normalize(value: np.ndarray) -> np.ndarray:
    s = value.sum(axis=1, keepdims=True)
    return np.divide(value, s, out=np.zeros_like(value), where=s > 0)


@njit(cache=True)
def _splitmix(state):
    state = (state + np.uint64(0x9E3779B97F4A7C15)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    z = state
    z = ((z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    z = ((z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    z = z ^ (z >> np.uint64(31))
    return state, z


@njit(cache=True)
def _grow(X, y, w, K, max_features, min_leaf, max_depth, seed):
    n, d = X.shape
    cap = 2 * n + 1
    feature = np.full(cap, -1, np.int64)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    value = np.zeros((cap, K))
    importance = np.zeros(d)

    idx = np.arange(n)
    tmp = np.empty(n, np.int64)
    vals = np.empty(n)
    perm = np.arange(d)
    tot = np.zeros(K)
    cum = np.zeros(K)
    st_s = np.empty(cap, np.int64)
    st_e = np.empty(cap, np.int64)
    st_node = np.empty(cap, np.int64)
    st_depth = np.empty(cap, np.int64)
    top = 0
    st_s[0] = 0
    st_e[0] = n
    st_node[0] = 0
    st_depth[0] = 0
    top = 1
    n_nodes = 1
    state = np.uint64(seed)

    while top > 0:
        top -= 1
        s = st_s[top]
        e = st_e[top]
        node = st_node[top]
        depth = st_depth[top]
        m = e - s
        tot[:] = 0.0
        for i in range(s, e):
            tot[y[idx[i]]] += w[idx[i]]
        W = 0.0
        sq = 0.0
        nonzero = 0
        for k in range(K):
            value[node, k] = tot[k]
            W += tot[k]
            sq += tot[k] * tot[k]
            if tot[k] > 0:
                nonzero += 1
        if nonzero <= 1 or m < 2 * min_leaf or (max_depth >= 0 and depth >= max_depth):
            continue
        base = sq / W

        # Fisher-Yates shuffle of the feature order
        for j in range(d - 1, 0, -1):
            state, r = _splitmix(state)
            jj = np.int64(r % np.uint64(j + 1))
            t = perm[j]
            perm[j] = perm[jj]
            perm[jj] = t

        best_score = -1.0
        best_f = -1
        best_t = 0.0
        visited = 0
        for jf in range(d):
            f = perm[jf]
            for i in range(m):
                vals[i] = X[idx[s + i], f]
            order = np.argsort(vals[:m], kind="mergesort")
            if vals[order[0]] == vals[order[m - 1]]:
                continue
            visited += 1
            cum[:] = 0.0
            WL = 0.0
            for r in range(m - 1):
                i = idx[s + order[r]]
                cum[y[i]] += w[i]
                WL += w[i]
                v0 = vals[order[r]]
                v1 = vals[order[r + 1]]
                if v0 == v1 or r + 1 < min_leaf or m - r - 1 < min_leaf:
                    continue
                WR = W - WL
                sl = 0.0
                sr = 0.0
                for k in range(K):
                    sl += cum[k] * cum[k]
                    rk = tot[k] - cum[k]
                    sr += rk * rk
                score = sl / WL + sr / WR
                if score > best_score:
                    best_score = score
                    best_f = f
                    mid = 0.5 * (v0 + v1)
                    best_t = mid if mid < v1 else v0
            if visited >= max_features and best_f >= 0:
                break
        if best_f < 0:
            continue

        # stable partition of idx[s:e] by the chosen split
        nl = 0
        for i in range(s, e):
            if X[idx[i], best_f] <= best_t:
                nl += 1
        a = s
        b = s + nl
        for i in range(s, e):
            if X[idx[i], best_f] <= best_t:
                tmp[a] = idx[i]
                a += 1
            else:
                tmp[b] = idx[i]
                b += 1
        for i in range(s, e):
            idx[i] = tmp[i]

        feature[node] = best_f
        threshold[node] = best_t
        importance[best_f] += best_score - base
        lnode = n_nodes
        rnode = n_nodes + 1
        n_nodes += 2
        left[node] = lnode
        right[node] = rnode
        # right child pushed first so the left subtree is grown first
        st_s[top] = s + nl
        st_e[top] = e
        st_node[top] = rnode
        st_depth[top] = depth + 1
        top += 1
        st_s[top] = s
        st_e[top] = s + nl
        st_node[top] = lnode
        st_depth[top] = depth + 1
        top += 1

    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(), left[:n_nodes].copy(),
            right[:n_nodes].copy(), value[:n_nodes].copy(), importance)


@njit(cache=True)
def _tree_proba(X, feature, threshold, left, right, prob):
    n = X.shape[0]
    out = np.empty((n, prob.shape[1]))
    for i in range(n):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = prob[node]
    return out


def grow_tree(X, yi, w, n_classes: int, config: ForestConfig, tree_seed: int) -> Tree:
    """One tree on the bootstrap drawn from ``tree_seed``."""
    n, d = X.shape
    rng = np.random.default_rng(tree_seed)
    if config.bootstrap:
        counts = np.bincount(rng.integers(0, n, size=n), minlength=n)
    else:
        counts = np.ones(n, dtype=np.int64)
    inner_seed = int(rng.integers(0, 2**63 - 1))
    keep = np.flatnonzero(counts)
    mf = config.max_features or max(1, math.ceil(math.sqrt(d)))
    arrays = _grow(
        np.ascontiguousarray(X[keep]), yi[keep].astype(np.int64), (w[keep] * counts[keep]).astype(np.float64),
        n_classes, min(mf, d), config.min_samples_leaf,
        -1 if config.max_depth is None else config.max_depth, inner_seed,
    )
    return Tree(*arrays)


def train_forest(X, y, sample_weight=None, config: ForestConfig = ForestConfig(),
                 feature_names=None, class_weights=None) -> ForestModel:
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y)
    classes = np.unique(y)
    if classes.size < 2:
        raise DegenerateTraining("need at least two classes")
    if config.n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    yi = np.searchsorted(classes, y)
    w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, dtype=float)
    trees = [grow_tree(X, yi, w, classes.size, config, config.seed + t) for t in range(config.n_trees)]
    return ForestModel(classes, trees, list(feature_names or []), dict(class_weights or {}), config)
