"""Algorithms for costs drawn uniformly from [0, 1].

Max-finding probes the globally cheapest edge between two surviving
candidates.  Selection and sorting pivot on :func:`uniform_rank_certificate`,
which probes cost bands of geometrically growing width until every element
is comparable with the pivot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from pricedsort.certificates import Certificate, MaxTree, Rank, Sort
from pricedsort.errors import ParameterError
from pricedsort.instance import upper_pairs
from pricedsort.oracle import ProbeState, Relation


@dataclass(frozen=True)
class UniformParams:
    """``alpha = alpha_coeff * ln(n)**2`` sets the width of the first cost band."""

    alpha_coeff: float = 1200.0

    def __post_init__(self) -> None:
        if not self.alpha_coeff > 0:
            raise ParameterError("alpha_coeff must be positive")

    def alpha(self, n: int) -> float:
        return self.alpha_coeff * math.log(n) ** 2


@dataclass(frozen=True)
class Band:
    lo: float
    hi: float
    probes: int
    cost: float


@dataclass(frozen=True)
class Split:
    below: np.ndarray
    above: np.ndarray
    bands: tuple[Band, ...] = field(default=())


@dataclass(frozen=True)
class Failed:
    unresolved: np.ndarray
    bands: tuple[Band, ...] = field(default=())


def uniform_find_max(state: ProbeState) -> tuple[int, Certificate]:
    """Repeatedly probe the cheapest edge joining two candidates; drop the loser."""
    n = state.n
    if n == 1:
        return 1, state.snapshot_certificate(MaxTree(1))
    iu, ju = upper_pairs(n)
    costs = state.costs[iu, ju]
    ranked = np.argsort(costs)
    if (np.diff(costs[ranked]) == 0).any():
        # Equal costs: a stable sort keeps lexicographic pair order among them.
        ranked = np.argsort(costs, kind="stable")
    us = (iu[ranked] + 1).tolist()
    vs = (ju[ranked] + 1).tolist()
    alive = [True] * (n + 1)
    left = n
    probe = state._probe
    for u, v in zip(us, vs):
        if alive[u] and alive[v]:
            loser = u if probe(u, v) is Relation.LESS else v
            alive[loser] = False
            left -= 1
            if left == 1:
                break
    winner = alive.index(True, 1)
    return winner, state.snapshot_certificate(MaxTree(winner))


def _probe_band(state: ProbeState, ids: np.ndarray, lo: float, hi: float, first: bool) -> Band:
    idx = ids - 1
    sub = state.costs[np.ix_(idx, idx)]
    inside = sub <= hi
    if not first:
        inside &= sub > lo
    a, b = np.nonzero(np.triu(inside, 1))
    before = state.total_cost
    fresh = state.probe_many(ids[a], ids[b], distinct=True)
    return Band(lo, hi, fresh, state.total_cost - before)


def uniform_rank_certificate(
    state: ProbeState,
    v: int,
    params: UniformParams = UniformParams(),
    members=None,
) -> Split | Failed:
    """Certify the position of pivot ``v`` within ``members`` (default: all elements).

    The first band covers costs in ``[0, alpha/m]`` for ``m = |members|``;
    each later band doubles the upper limit (clamped at 1) and only touches
    the pivot and the elements still incomparable with it.
    """
    ids = np.arange(1, state.n + 1) if members is None else np.asarray(members, dtype=np.int64)
    if v not in set(ids.tolist()):
        raise ParameterError(f"pivot {v} is not a member")
    m = len(ids)
    others = ids[ids != v]
    if m == 1:
        return Split(others, others)
    hi = min(1.0, params.alpha(m) / m)
    lo = 0.0
    bands = []
    pool = ids
    while True:
        bands.append(_probe_band(state, pool, lo, hi, first=not bands))
        rel = state.relations_to(v, others)
        open_ = others[rel == Relation.UNKNOWN]
        if open_.size == 0 or hi >= 1.0:
            break
        pool = np.append(open_, v)
        lo, hi = hi, min(1.0, 2.0 * hi)
    if open_.size:
        return Failed(open_, tuple(bands))
    rel = state.relations_to(v, others)
    return Split(others[rel == Relation.LESS], others[rel == Relation.GREATER], tuple(bands))


def _split_or_reveal(state, v, params, members) -> tuple[np.ndarray, np.ndarray]:
    out = uniform_rank_certificate(state, v, params, members)
    if isinstance(out, Failed):
        # Reveal every remaining edge of the subproblem.
        ids = np.asarray(members, dtype=np.int64)
        a, b = np.triu_indices(len(ids), 1)
        state.probe_many(ids[a], ids[b], distinct=True)
        others = ids[ids != v]
        rel = state.relations_to(v, others)
        return others[rel == Relation.LESS], others[rel == Relation.GREATER]
    return out.below, out.above


def uniform_selection(
    state: ProbeState,
    k: int,
    params: UniformParams = UniformParams(),
    rng: np.random.Generator | None = None,
) -> tuple[int, Certificate]:
    """Return the k-th smallest element with a rank certificate."""
    n = state.n
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= n:
        raise ParameterError(f"k={k} outside 1..{n}")
    rng = np.random.default_rng() if rng is None else rng
    members = np.arange(1, n + 1)
    want = int(k)
    while len(members) > 1:
        v = int(members[rng.integers(len(members))])
        below, above = _split_or_reveal(state, v, params, members)
        if want <= len(below):
            members = below
        elif want == len(below) + 1:
            members = np.array([v])
        else:
            want -= len(below) + 1
            members = above
    answer = int(members[0])
    return answer, state.snapshot_certificate(Rank(int(k), answer))


def uniform_sort(
    state: ProbeState,
    params: UniformParams = UniformParams(),
    rng: np.random.Generator | None = None,
) -> tuple[list[int], Certificate]:
    """Quicksort on certified pivot splits."""
    rng = np.random.default_rng() if rng is None else rng
    out: list[int] = []
    # Stack of pending pieces; a bare int is an already placed pivot.
    stack: list = [np.arange(1, state.n + 1)]
    while stack:
        piece = stack.pop()
        if isinstance(piece, int):
            out.append(piece)
            continue
        if len(piece) == 1:
            out.append(int(piece[0]))
            continue
        if len(piece) == 0:
            continue
        v = int(piece[rng.integers(len(piece))])
        below, above = _split_or_reveal(state, v, params, piece)
        stack.extend((above, v, below))
    return out, state.snapshot_certificate(Sort(tuple(out)))
