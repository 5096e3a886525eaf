"""Rule-based forecasters over a unit's observed phase history."""
from __future__ import annotations

from typing import Mapping, Sequence

from ..ingest import Period

History = Mapping[Period, int]


class NotPredictable(ValueError):
    pass


def _prior(history: History, target: Period) -> list[tuple[Period, int]]:
    return sorted((p, v) for p, v in history.items() if p < target)


def baseline_pps(history: History, target: Period) -> int:
    """Phase of the most recent observed period before ``target``."""
    prior = _prior(history, target)
    if not prior:
        raise NotPredictable("no prior period")
    return prior[-1][1]


def baseline_sply(history: History, target: Period) -> int:
    try:
        return history[target.same_last_year()]
    except KeyError:
        raise NotPredictable(f"no observation at {target.same_last_year()}") from None


def baseline_max2pp(history: History, target: Period) -> int:
    prior = _prior(history, target)
    if len(prior) < 2:
        raise NotPredictable("fewer than two prior periods")
    return max(prior[-1][1], prior[-2][1])


BASELINES = {"PPS": baseline_pps, "SPLY": baseline_sply, "Max-2PP": baseline_max2pp}


def count_transitions(phases: Sequence[int], crisis_threshold: int = 3) -> int:
    """Consecutive pairs where the crisis indicator (phase >= threshold) flips."""
    flags = [p >= crisis_threshold for p in phases]
    return sum(a != b for a, b in zip(flags, flags[1:]))
