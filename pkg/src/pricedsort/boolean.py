"""Algorithms for costs that are 0 with probability p and 1 otherwise.

All of them start by performing every free comparison; the transitive
closure of those edges is a random partial order that often settles most of
the answer before any unit-cost probe is made.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from pricedsort.certificates import Certificate, MaxTree, Rank, Sort
from pricedsort.errors import ParameterError
from pricedsort.instance import CostVariant, upper_pairs
from pricedsort.oracle import ProbeState, Relation


@dataclass(frozen=True)
class BooleanParams:
    """Window width for selection: ``quadratic`` is ``3 ln n / p**2``,
    ``lemma`` is ``150 ln n ln(n/p) / p``."""

    w_mode: str = "quadratic"

    def __post_init__(self) -> None:
        if self.w_mode not in ("quadratic", "lemma"):
            raise ParameterError(f"unknown w_mode {self.w_mode!r}")

    def window(self, n: int, p: float) -> int:
        if n <= 1:
            return 1
        if self.w_mode == "quadratic":
            w = 3.0 * math.log(n) / p**2
        else:
            w = 150.0 * math.log(n) * math.log(n / p) / p
        return max(1, math.ceil(w))


def probe_free(state: ProbeState) -> int:
    """Perform every zero-cost comparison; returns how many were new."""
    iu, ju = upper_pairs(state.n)
    free = np.flatnonzero(state.costs.ravel()[iu * state.n + ju] == 0.0)
    return state._probe_pairs(iu[free], ju[free], distinct=True)


def _model_p(state: ProbeState) -> float:
    model = state.instance.model
    if model.variant is not CostVariant.BOOLEAN:
        raise ParameterError("boolean algorithms need a boolean-cost instance")
    return model.p


def standard_find_max(state: ProbeState, candidates) -> int:
    """Knock-out scan; relations already known cost nothing."""
    items = [int(x) for x in candidates]
    if not items:
        raise ParameterError("candidates must be non-empty")
    best = items[0]
    for x in items[1:]:
        rel = state.comparable(x, best)
        if rel is Relation.UNKNOWN:
            rel = state.probe(x, best)
        if rel is Relation.GREATER:
            best = x
    return best


def standard_find_min(state: ProbeState, candidates) -> int:
    items = [int(x) for x in candidates]
    if not items:
        raise ParameterError("candidates must be non-empty")
    best = items[0]
    for x in items[1:]:
        rel = state.comparable(x, best)
        if rel is Relation.UNKNOWN:
            rel = state.probe(x, best)
        if rel is Relation.LESS:
            best = x
    return best


def standard_selection(state: ProbeState, subset, k: int, rng: np.random.Generator | None = None) -> int:
    """Quickselect with random pivots, consulting known relations before probing."""
    items = np.asarray(list(subset), dtype=np.int64)
    if not 1 <= k <= len(items):
        raise ParameterError(f"k={k} outside 1..{len(items)}")
    rng = np.random.default_rng() if rng is None else rng
    while len(items) > 1:
        pivot = int(items[rng.integers(len(items))])
        others = items[items != pivot]
        rel = state.relations_to(pivot, others)
        for t in np.flatnonzero(rel == Relation.UNKNOWN):
            x = int(others[t])
            r = state.comparable(x, pivot)
            rel[t] = r if r is not Relation.UNKNOWN else state.probe(x, pivot)
        below = others[rel == Relation.LESS]
        if k <= len(below):
            items = below
        elif k == len(below) + 1:
            return pivot
        else:
            k -= len(below) + 1
            items = others[rel == Relation.GREATER]
    return int(items[0])


def boolean_find_max(state: ProbeState, stats: dict | None = None) -> tuple[int, Certificate]:
    """Free comparisons first, then a knock-out among the elements that never lost."""
    _model_p(state)
    probe_free(state)
    survivors = state.maximal_among(np.arange(1, state.n + 1))
    if stats is not None:
        stats["survivors"] = len(survivors)
    top = standard_find_max(state, survivors)
    return top, state.snapshot_certificate(MaxTree(top))


def _settle(state: ProbeState, x: int) -> None:
    """Probe ``x`` against everything whose relation to it is still unknown."""
    others = np.arange(1, state.n + 1)
    others = others[others != x]
    for y in others[state.relations_to(x, others) == Relation.UNKNOWN]:
        if state.comparable(int(y), x) is Relation.UNKNOWN:
            state.probe(int(y), x)


def boolean_selection(
    state: ProbeState,
    k: int,
    params: BooleanParams = BooleanParams(),
    rng: np.random.Generator | None = None,
    stats: dict | None = None,
) -> tuple[int, Certificate]:
    """Narrow the search to a window of plausible ranks found by free comparisons."""
    n = state.n
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= n:
        raise ParameterError(f"k={k} outside 1..{n}")
    p = _model_p(state)
    rng = np.random.default_rng() if rng is None else rng
    probe_free(state)
    w = params.window(n, p)
    ids = np.arange(1, n + 1)
    if w >= n:
        S = ids
    else:
        wins = state.below_counts()
        losses = state.above_counts()
        S = ids[(wins >= k - 1 - w) & (losses >= n - k - w)]
    info = {"w": w, "s_size": len(S), "fallback": True}
    answer = None
    if len(S):
        lo = standard_find_min(state, S)
        hi = standard_find_max(state, S)
        _settle(state, lo)
        _settle(state, hi)
        r_min = int(state.below_counts([lo])[0]) + 1
        r_max = int(state.below_counts([hi])[0]) + 1
        info.update(r_min=r_min, r_max=r_max)
        if r_min <= k <= r_max:
            inside = (state.relations_to(lo, ids) == Relation.GREATER) & (
                state.relations_to(hi, ids) == Relation.LESS
            )
            T = np.union1d(ids[inside], [lo, hi])
            info.update(fallback=False, t_size=len(T))
            answer = standard_selection(state, T, k - r_min + 1, rng)
    if answer is None:
        answer = standard_selection(state, ids, int(k), rng)
    if stats is not None:
        stats.update(info)
    return answer, state.snapshot_certificate(Rank(int(k), answer))


def boolean_sort_repeated_max(state: ProbeState) -> tuple[list[int], Certificate]:
    """Sort by extracting the maximum n-1 times, reusing everything learned."""
    _model_p(state)
    probe_free(state)
    remaining = np.arange(1, state.n + 1)
    top_down: list[int] = []
    while len(remaining) > 1:
        top = standard_find_max(state, state.maximal_among(remaining))
        top_down.append(top)
        remaining = remaining[remaining != top]
    top_down.append(int(remaining[0]))
    order = top_down[::-1]
    return order, state.snapshot_certificate(Sort(tuple(order)))
