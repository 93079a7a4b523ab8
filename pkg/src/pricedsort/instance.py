"""Random problem instances: a hidden total order plus a cost for every pair.

Elements are identified by the integers ``1..n``.  The hidden order is a
uniformly random permutation, so an element's id says nothing about its rank.
Costs live in a dense symmetric ``n x n`` matrix; forbidden comparisons carry
``math.inf`` so the matrix is total for every model.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any

import numpy as np

from pricedsort.errors import ParameterError

INF = math.inf


class CostVariant(str, enum.Enum):
    UNIFORM = "uniform"
    BOOLEAN = "boolean"
    UNIT_INFINITE = "unit-inf"


@dataclass(frozen=True)
class CostModel:
    """Sampling law for the comparison costs.

    ``p`` is the probability of a free comparison under ``BOOLEAN`` and of an
    allowed (unit cost) comparison under ``UNIT_INFINITE``.  ``UNIFORM``
    ignores it.
    """

    variant: CostVariant
    p: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", CostVariant(self.variant))
        if self.variant is CostVariant.UNIFORM:
            return
        if not (0.0 < self.p <= 1.0) or math.isnan(self.p):
            raise ParameterError(f"p must lie in (0, 1], got {self.p!r}")

    @classmethod
    def uniform(cls) -> CostModel:
        return cls(CostVariant.UNIFORM)

    @classmethod
    def boolean(cls, p: float) -> CostModel:
        return cls(CostVariant.BOOLEAN, p)

    @classmethod
    def unit_infinite(cls, p: float) -> CostModel:
        return cls(CostVariant.UNIT_INFINITE, p)

    @classmethod
    def parse(cls, name: str, p: float | None = None) -> CostModel:
        variant = CostVariant(name)
        if variant is CostVariant.UNIFORM:
            return cls(variant)
        if p is None:
            raise ParameterError(f"model {name!r} needs p")
        return cls(variant, p)

    def sample(self, rng: np.random.Generator, shape) -> np.ndarray:
        """Draw i.i.d. costs with the given shape."""
        if self.variant is CostVariant.UNIFORM:
            return rng.random(shape)
        u = rng.random(shape)
        if self.variant is CostVariant.BOOLEAN:
            return np.where(u < self.p, 0.0, 1.0)
        return np.where(u < self.p, 1.0, INF)


@dataclass(frozen=True)
class RngStream:
    """Per-trial randomness derived from a root seed and a trial ordinal.

    The two integers are mixed by numpy's ``SeedSequence`` hash, so a trial's
    randomness does not depend on which worker runs it or in what order.
    Instance sampling and algorithm coin flips use separate child streams.
    """

    root_seed: int
    trial_index: int = 0

    def __post_init__(self) -> None:
        if self.root_seed < 0 or self.root_seed >= 2**64:
            raise ParameterError("root_seed must be a 64-bit unsigned integer")
        if self.trial_index < 0:
            raise ParameterError("trial_index must be non-negative")

    def _sequence(self, child: int) -> np.random.SeedSequence:
        return np.random.SeedSequence(self.root_seed, spawn_key=(self.trial_index, child))

    @property
    def seed(self) -> int:
        """64-bit replay seed identifying this stream."""
        return int(self._sequence(0).generate_state(1, np.uint64)[0])

    def instance_rng(self) -> np.random.Generator:
        return np.random.default_rng(self._sequence(0))

    def algorithm_rng(self) -> np.random.Generator:
        return np.random.default_rng(self._sequence(1))


@dataclass(frozen=True, eq=False)
class Instance:
    """One trial's ground truth.

    ``order[i]`` is the true rank (1..n) of element ``i + 1``.  ``costs`` is a
    read-only symmetric matrix indexed by ``id - 1``; its diagonal is ``inf``
    because an element is never compared with itself.
    """

    n: int
    order: np.ndarray
    costs: np.ndarray
    model: CostModel
    seed: int = 0

    def rank_of(self, element: int) -> int:
        if not isinstance(element, (int, np.integer)) or not 1 <= element <= self.n:
            raise ParameterError(f"unknown element {element!r} (n={self.n})")
        return int(self.order[element - 1])

    def cost(self, u: int, v: int) -> float:
        if u == v:
            raise ParameterError("an element has no cost against itself")
        for x in (u, v):
            if not 1 <= x <= self.n:
                raise ParameterError(f"unknown element {x!r} (n={self.n})")
        return float(self.costs[u - 1, v - 1])

    @cached_property
    def by_rank(self) -> np.ndarray:
        """Element ids listed from smallest to largest."""
        ids = np.empty(self.n, dtype=np.int64)
        ids[self.order - 1] = np.arange(1, self.n + 1)
        ids.flags.writeable = False
        return ids

    @cached_property
    def rank_costs(self) -> np.ndarray:
        """Cost matrix re-indexed by true rank (row ``i`` is ``v_{i+1}``)."""
        idx = self.by_rank - 1
        out = self.costs[np.ix_(idx, idx)]
        out.flags.writeable = False
        return out

    def pair_costs(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """All unordered pairs ``u < v`` (by id) and their costs."""
        iu, ju = upper_pairs(self.n)
        return iu + 1, ju + 1, self.costs[iu, ju]

    def same_as(self, other: Instance) -> bool:
        return (
            self.n == other.n
            and self.model == other.model
            and self.seed == other.seed
            and np.array_equal(self.order, other.order)
            and self.costs.tobytes() == other.costs.tobytes()
        )

    def to_json(self) -> dict[str, Any]:
        u, v, c = self.pair_costs()
        return {
            "n": self.n,
            "model": self.model.variant.value,
            "p": self.model.p,
            "seed": self.seed,
            "order": self.order.tolist(),
            "costs": [
                [int(a), int(b), "inf" if math.isinf(x) else float(x)]
                for a, b, x in zip(u, v, c)
            ],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> Instance:
        n = int(data["n"])
        model = CostModel.parse(data["model"], data.get("p"))
        costs = np.full((n, n), INF)
        for a, b, x in data["costs"]:
            value = INF if x == "inf" else float(x)
            costs[a - 1, b - 1] = costs[b - 1, a - 1] = value
        return _freeze(n, np.asarray(data["order"], dtype=np.int64), costs, model, int(data.get("seed", 0)))


_UPPER_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def upper_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Row-major indices of the strict upper triangle (lexicographic pair order)."""
    hit = _UPPER_CACHE.get(n)
    if hit is None:
        iu, ju = np.triu_indices(n, 1)
        iu.flags.writeable = False
        ju.flags.writeable = False
        hit = (iu, ju)
        if n <= 1024:
            _UPPER_CACHE[n] = hit
    return hit


def _freeze(n, order, costs, model, seed) -> Instance:
    if sorted(order.tolist()) != list(range(1, n + 1)):
        raise ParameterError("order must be a permutation of 1..n")
    order = np.array(order, dtype=np.int64)
    order.flags.writeable = False
    costs.flags.writeable = False
    return Instance(n=n, order=order, costs=costs, model=model, seed=seed)


def generate_instance(n: int, model: CostModel, stream: RngStream) -> Instance:
    """Sample a hidden uniformly random order and i.i.d. pair costs."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n!r}")
    if not isinstance(model, CostModel):
        raise ParameterError("model must be a CostModel")
    rng = stream.instance_rng()
    order = rng.permutation(n) + 1
    # One draw per unordered pair, in row-major upper-triangle order.
    iu, ju = upper_pairs(n)
    values = model.sample(rng, len(iu))
    costs = np.full((n, n), INF)
    costs[iu, ju] = values
    costs[ju, iu] = values
    return _freeze(int(n), order, costs, model, stream.seed)


def instance_from_order(order, costs, model: CostModel, seed: int = 0) -> Instance:
    """Build an instance from explicit data (tests and replays)."""
    order = np.asarray(order, dtype=np.int64)
    n = len(order)
    costs = np.array(costs, dtype=float)
    if costs.shape != (n, n):
        raise ParameterError("costs must be an n x n matrix")
    if not np.array_equal(costs, costs.T):
        raise ParameterError("costs must be symmetric")
    np.fill_diagonal(costs, INF)
    return _freeze(n, order, costs, model, seed)
