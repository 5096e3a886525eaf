"""Rank correlation with average-rank ties and a t-approximation p-value."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import betainc


class Undefined(ValueError):
    """Correlation undefined, e.g. a constant series."""


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class SeriesPair:
    x: tuple[float, ...]
    y: tuple[float, ...]
    periods: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        object.__setattr__(self, "periods", tuple(self.periods))
        if len(self.x) != len(self.y):
            raise ValueError("series lengths differ")

    def __len__(self):
        return len(self.x)


def ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks; ties share the mean of the positions they occupy."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("ranks of an empty sequence")
    order = np.argsort(v, kind="mergesort")
    sv = v[order]
    # start index of each run of equal values
    starts = np.flatnonzero(np.r_[True, sv[1:] != sv[:-1]])
    ends = np.r_[starts[1:], sv.size]
    avg = (starts + ends + 1) / 2.0
    out = np.empty(v.size)
    out[order] = np.repeat(avg, ends - starts)
    return out


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    a = a - a.mean()
    b = b - b.mean()
    saa = float(a @ a)
    sbb = float(b @ b)
    if saa == 0.0 or sbb == 0.0:
        raise Undefined("constant series")
    r = float(a @ b) / math.sqrt(saa * sbb)
    return max(-1.0, min(1.0, r))


def spearman(pair_or_x, y=None) -> float:
    if y is None:
        x, y = pair_or_x.x, pair_or_x.y
    else:
        x = pair_or_x
    if len(x) != len(y):
        raise ValueError("series lengths differ")
    if len(x) < 2:
        raise Undefined("need at least two observations")
    return _pearson(ranks(x), ranks(y))


def p_value(rho: float, n: int) -> float:
    """Two-sided p for H0: rho = 0 using t = rho*sqrt((n-2)/(1-rho^2)), df = n-2."""
    if n < 3:
        raise InsufficientData(f"n={n} < 3")
    if not -1.0 <= rho <= 1.0:
        raise ValueError(f"rho out of range: {rho}")
    if abs(rho) == 1.0:
        return 0.0
    df = n - 2
    t2 = rho * rho * df / (1.0 - rho * rho)
    # P(|T| > t) = I_{df/(df+t^2)}(df/2, 1/2)
    return float(min(1.0, betainc(df / 2.0, 0.5, df / (df + t2))))


def permutation_p(x, y, n_perm: int = 10_000, seed: int = 0) -> float:
    """Two-sided permutation p, add-one corrected."""
    rx, ry = ranks(x), ranks(y)
    obs = abs(_pearson(rx, ry))
    rng = np.random.default_rng(seed)
    rx = rx - rx.mean()
    ry = ry - ry.mean()
    denom = math.sqrt(float(rx @ rx) * float(ry @ ry))
    perms = np.argsort(rng.random((n_perm, ry.size)), axis=1)
    r = (ry[perms] @ rx) / denom
    hits = int(np.count_nonzero(np.abs(r) >= obs - 1e-12))
    return (hits + 1) / (n_perm + 1)
