"""Algorithms for costs that are 1 (allowed) or infinite (forbidden).

Only allowed pairs can ever be compared, so the best one can learn is the
partial order generated by the allowed edges.  These routines find maximal
elements of that order: elements with no allowed comparison to a larger one.
"""

from __future__ import annotations

import numpy as np

from pricedsort.certificates import Certificate, Maximal, MaximalSet
from pricedsort.errors import ParameterError
from pricedsort.instance import CostVariant, Instance
from pricedsort.oracle import ProbeState, Relation


def allowed_neighbours(state_or_instance, v: int) -> np.ndarray:
    """Ids that ``v`` may be compared with, in increasing order."""
    row = state_or_instance.costs[v - 1]
    return np.flatnonzero(np.isfinite(row)) + 1


def isolated_count(instance: Instance) -> int:
    """Number of elements with no allowed comparison at all."""
    return int((~np.isfinite(instance.costs)).all(axis=1).sum())


def poset_find_maximal(state: ProbeState) -> tuple[int, Certificate]:
    """Walk upward from element 1 until the current element beats every neighbour.

    Elements that lost are already known to lie below the current one, so
    every paid probe eliminates a fresh element and at most n-1 are made.
    """
    v = 1
    restart = True
    while restart:
        restart = False
        for y in allowed_neighbours(state, v).tolist():
            if state.comparable(y, v) is not Relation.UNKNOWN:
                continue
            if state.probe(y, v) is Relation.GREATER:
                v = y
                restart = True
                break
    return v, state.snapshot_certificate(Maximal(v))


def poset_find_all_maximal(
    state: ProbeState, rng: np.random.Generator | None = None
) -> tuple[frozenset[int], Certificate]:
    """Give every element that has not lost a chance to lose.

    Each element probes its allowed neighbours in random order until it
    loses a direct comparison.  Pairs whose direction is already known are
    not paid for again.  The survivors are exactly the maximal elements.
    """
    rng = np.random.default_rng() if rng is None else rng
    n = state.n
    lost = np.zeros(n + 1, dtype=bool)
    for v in range(1, n + 1):
        if lost[v]:
            continue
        for y in rng.permutation(allowed_neighbours(state, v)).tolist():
            rel = state.comparable(y, v)
            if rel is Relation.UNKNOWN:
                rel = state.probe(y, v)
                if rel is Relation.LESS:
                    lost[y] = True
            if rel is Relation.GREATER:
                lost[v] = True
                break
    winners = frozenset(v for v in range(1, n + 1) if not lost[v])
    return winners, state.snapshot_certificate(MaximalSet(winners))


def exhaustive_maximal_set(instance: Instance) -> frozenset[int]:
    """Ground truth: elements with no allowed edge to a truly larger element."""
    if instance.model.variant is not CostVariant.UNIT_INFINITE:
        raise ParameterError("exhaustive_maximal_set needs a unit/infinite-cost instance")
    order = np.asarray(instance.order)
    larger = order[None, :] > order[:, None]
    beaten = (np.isfinite(instance.costs) & larger).any(axis=1)
    return frozenset((np.flatnonzero(~beaten) + 1).tolist())
