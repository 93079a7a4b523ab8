"""Exact linear-extension counting for small posets, and a sorter built on it.

Extensions are counted by dynamic programming over downsets: ``f[D]`` is the
number of ways to lay out the downset ``D`` and ``g[D]`` the number of ways
to finish from it.  Both are computed layer by layer over all ``2**n``
bitmasks, which caps exact work at ``n = 12``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from pricedsort.boolean import _model_p, probe_free
from pricedsort.bounds import expected_extensions
from pricedsort.certificates import Certificate, Sort
from pricedsort.errors import ParameterError, SizeError
from pricedsort.oracle import ProbeState

__all__ = [
    "MAX_EXACT_N",
    "Poset",
    "balanced_pair_sort",
    "balanced_probe_target",
    "count_linear_extensions",
    "expected_extensions",
    "precedence_counts",
]

MAX_EXACT_N = 12


@dataclass(frozen=True)
class Poset:
    """Strict partial order on ``0..n-1``; ``below[i]`` is the bitmask of elements under ``i``."""

    n: int
    below: tuple[int, ...]

    @classmethod
    def from_matrix(cls, less) -> Poset:
        """Build from ``less[a, b]`` meaning ``a < b``; the relation is closed transitively."""
        M = np.array(less, dtype=bool)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ParameterError("relation must be a square matrix")
        n = M.shape[0]
        # Warshall's algorithm; n is small wherever posets are built.
        for k in range(n):
            M |= np.outer(M[:, k], M[k])
        if M.diagonal().any():
            raise ParameterError("relation has a cycle")
        weights = 1 << np.arange(n, dtype=object)
        below = tuple(int(weights[M[:, i]].sum()) for i in range(n))
        return cls(n, below)

    @classmethod
    def from_state(cls, state: ProbeState, ids=None) -> Poset:
        """The known order among ``ids`` (default: all elements, position i is id i+1)."""
        return cls.from_matrix(state.known_matrix(ids))

    @classmethod
    def antichain(cls, n: int) -> Poset:
        return cls(n, (0,) * n)

    def less(self, a: int, b: int) -> bool:
        return bool(self.below[b] >> a & 1)

    def matrix(self) -> np.ndarray:
        M = np.zeros((self.n, self.n), dtype=bool)
        for b, mask in enumerate(self.below):
            for a in range(self.n):
                M[a, b] = mask >> a & 1
        return M

    def is_total(self) -> bool:
        return sum(m.bit_count() for m in self.below) == self.n * (self.n - 1) // 2


@functools.lru_cache(maxsize=None)
def _layout(n: int):
    masks = np.arange(1 << n, dtype=np.int64)
    pop = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        pop += (masks >> i) & 1
    layers = [np.flatnonzero(pop == k) for k in range(n + 1)]
    absent = np.array([(masks >> i) & 1 == 0 for i in range(n)]).reshape(n, 1 << n)
    return masks, layers, absent


def _tables(poset: Poset):
    n = poset.n
    if n > MAX_EXACT_N:
        raise SizeError(f"exact extension counting supports n <= {MAX_EXACT_N}, got {n}")
    masks, layers, absent = _layout(n)
    below = np.array(poset.below, dtype=np.int64)
    # addable[i, D]: i is outside D and everything under i is inside D.
    addable = absent & ((below[:, None] & ~masks[None, :]) == 0)
    f = np.zeros(1 << n, dtype=np.int64)
    g = np.zeros(1 << n, dtype=np.int64)
    f[0] = 1
    g[-1] = 1
    for k in range(n):
        layer = layers[k]
        for i in range(n):
            src = layer[addable[i, layer]]
            f[src | (1 << i)] += f[src]
    for k in range(n - 1, -1, -1):
        layer = layers[k]
        for i in range(n):
            src = layer[addable[i, layer]]
            g[src] += g[src | (1 << i)]
    return masks, absent, addable, f, g


def count_linear_extensions(poset: Poset) -> int:
    """Exact number of linear extensions (n <= 12)."""
    if poset.n == 0:
        return 1
    return int(_tables(poset)[3][-1])


def precedence_counts(poset: Poset) -> np.ndarray:
    """``C[a, b]`` = number of linear extensions placing ``a`` before ``b``.

    The diagonal holds the total count.
    """
    n = poset.n
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    masks, absent, addable, f, g = _tables(poset)
    bits = (1 << np.arange(n, dtype=np.int64))[:, None]
    # Extensions that place a right after laying out downset D.
    H = np.where(addable, f[None, :] * g[masks[None, :] | bits], 0)
    C = H @ absent.T.astype(np.int64)
    np.fill_diagonal(C, f[-1])
    return C


def balanced_pair_sort(state: ProbeState) -> tuple[list[int], Certificate, list[dict]]:
    """Sort by always probing the pair that splits the extensions most evenly.

    Free comparisons are made first.  Each step's trace entry records the
    pair, its fraction of extensions with the first element lower, and the
    extension counts before and after the probe.
    """
    n = state.n
    if n > MAX_EXACT_N:
        raise SizeError(f"balanced_pair_sort supports n <= {MAX_EXACT_N}, got {n}")
    _model_p(state)
    probe_free(state)
    trace: list[dict] = []
    poset = Poset.from_state(state)
    total = count_linear_extensions(poset)
    while total > 1:
        C = precedence_counts(poset)
        M = poset.matrix()
        best = None
        for a in range(n):
            for b in range(a + 1, n):
                if M[a, b] or M[b, a]:
                    continue
                gap = abs(2 * int(C[a, b]) - total)
                if best is None or gap < best[0]:
                    best = (gap, a, b)
        _, a, b = best
        state.probe(a + 1, b + 1)
        poset = Poset.from_state(state)
        after = count_linear_extensions(poset)
        trace.append(
            {
                "pair": [a + 1, b + 1],
                "fraction": int(C[a, b]) / total,
                "before": total,
                "if_less": int(C[a, b]),
                "if_greater": total - int(C[a, b]),
                "after": after,
            }
        )
        total = after
    order = (np.argsort(state.below_counts(), kind="stable") + 1).tolist()
    return order, state.snapshot_certificate(Sort(tuple(order))), trace


def balanced_probe_target(extensions: int) -> int:
    """Probe budget ``ceil(log_{3/2} e)`` that a 1/3-2/3 split always meets."""
    if extensions < 1:
        raise ParameterError("extension count must be positive")
    if extensions == 1:
        return 0
    return math.ceil(math.log(extensions) / math.log(1.5))
