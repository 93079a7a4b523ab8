"""Probe accounting and the transitively closed known order.

Every algorithm touches an instance only through a :class:`ProbeState`.  Costs
are public; directions are revealed by probing, which charges the pair's cost
once.  The state keeps the transitive closure of all revealed directions so
that algorithms can ask whether a pair is already comparable.

Internally the closure is stored as a boolean matrix indexed by true rank
position.  Any topological order of the revealed DAG gives the same closure,
and the hidden order is one, so indexing by it only speeds the bookkeeping up;
answers are a function of the probed edges alone.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from pricedsort.certificates import Certificate, CertificateKind
from pricedsort.errors import ForbiddenComparisonError, ParameterError
from pricedsort.instance import Instance


class Relation(enum.IntEnum):
    """Known relation of a left-hand element to a right-hand one."""

    LESS = -1
    UNKNOWN = 0
    GREATER = 1


def close_positions(less: np.ndarray) -> None:
    """Transitively close ``less`` in place.

    ``less`` is indexed by a topological order, so it is strictly upper
    triangular.  Rows are finished from the top rank down; a row only has to
    absorb the rows of successors not already covered by an earlier one.
    """
    n = less.shape[0]
    if n < 2:
        return
    # Rows become Python ints used as bitsets: bit j stands for column j.
    packed = np.packbits(less, axis=1, bitorder="little")
    width = packed.shape[1]
    rows = [int.from_bytes(packed[i].tobytes(), "little") for i in range(n)]
    for i in range(n - 2, -1, -1):
        row = need = rows[i]
        while need:
            low = need & -need
            reach = rows[low.bit_length() - 1]
            row |= reach
            need &= ~reach
            need ^= low
        rows[i] = row
    packed = np.frombuffer(b"".join(r.to_bytes(width, "little") for r in rows), dtype=np.uint8)
    less[:] = np.unpackbits(packed.reshape(n, width), axis=1, count=n, bitorder="little").astype(bool)


class ProbeState:
    """Mutable per-trial probe record for one instance."""

    # Batches larger than this fraction of n are closed by a full sweep.
    _SWEEP_FACTOR = 1.0

    def __init__(self, instance: Instance):
        self.instance = instance
        self.n = instance.n
        self.total_cost = 0.0
        self.probe_count = 0
        self._pos = np.asarray(instance.order, dtype=np.int64) - 1
        self._pos_list = self._pos.tolist()
        self._less = np.zeros((self.n, self.n), dtype=bool)
        self._probed = np.zeros((self.n, self.n), dtype=bool)
        # lost[i]: element i + 1 was the smaller end of some probe.  Elements
        # that never lost sit below nothing, so queries about them need no flush.
        self._lost = np.zeros(self.n, dtype=bool)
        self._pending_pairs: list[tuple[int, int]] = []
        self._pending_batches: list[tuple[np.ndarray, np.ndarray]] = []
        self._pending_count = 0
        self._chunks: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
        self._single: list[tuple[int, int, float]] = []

    @property
    def costs(self) -> np.ndarray:
        """The full (public) cost matrix, indexed by ``id - 1``."""
        return self.instance.costs

    # -- validation -----------------------------------------------------

    def _check(self, u, v) -> None:
        for x in (u, v):
            if not isinstance(x, (int, np.integer)) or not 1 <= x <= self.n:
                raise ParameterError(f"unknown element {x!r} (n={self.n})")
        if u == v:
            raise ParameterError("cannot compare an element with itself")

    # -- queries --------------------------------------------------------

    def cost_of(self, u: int, v: int) -> float:
        self._check(u, v)
        return float(self.instance.costs[u - 1, v - 1])

    def is_probed(self, u: int, v: int) -> bool:
        self._check(u, v)
        return bool(self._probed[u - 1, v - 1])

    def comparable(self, u: int, v: int) -> Relation:
        self._check(u, v)
        if not (self._lost[u - 1] or self._lost[v - 1]):
            return Relation.UNKNOWN
        self._flush()
        a, b = self._pos[u - 1], self._pos[v - 1]
        if a < b:
            return Relation.LESS if self._less[a, b] else Relation.UNKNOWN
        return Relation.GREATER if self._less[b, a] else Relation.UNKNOWN

    def relations_to(self, v: int, others) -> np.ndarray:
        """Relation of each element of ``others`` to ``v`` (-1, 0 or +1)."""
        self._flush()
        others = np.asarray(others, dtype=np.int64)
        pv = self._pos[v - 1]
        po = self._pos[others - 1]
        out = np.zeros(len(others), dtype=np.int64)
        out[self._less[po, pv]] = Relation.LESS
        out[self._less[pv, po]] = Relation.GREATER
        return out

    def below_counts(self, ids=None) -> np.ndarray:
        """Number of elements known to be smaller than each element."""
        self._flush()
        counts = self._less.sum(axis=0)[self._pos]
        return counts if ids is None else counts[np.asarray(ids) - 1]

    def above_counts(self, ids=None) -> np.ndarray:
        """Number of elements known to be larger than each element."""
        self._flush()
        counts = self._less.sum(axis=1)[self._pos]
        return counts if ids is None else counts[np.asarray(ids) - 1]

    def known_matrix(self, ids=None) -> np.ndarray:
        """``M[a, b]`` is True iff ``ids[a] < ids[b]`` is known."""
        self._flush()
        ids = np.arange(1, self.n + 1) if ids is None else np.asarray(ids, dtype=np.int64)
        p = self._pos[ids - 1]
        return self._less[np.ix_(p, p)]

    def maximal_among(self, ids) -> np.ndarray:
        """Members of ``ids`` with no known larger element inside ``ids``."""
        ids = np.asarray(ids, dtype=np.int64)
        if len(ids) == self.n and len(np.unique(ids)) == self.n:
            return ids[~self._lost[ids - 1]]
        return ids[~self.known_matrix(ids).any(axis=1)]

    def minimal_among(self, ids) -> np.ndarray:
        ids = np.asarray(ids, dtype=np.int64)
        return ids[~self.known_matrix(ids).any(axis=0)]

    # -- probing --------------------------------------------------------

    def probe(self, u: int, v: int) -> Relation:
        """Reveal the direction of ``(u, v)``, charging its cost the first time."""
        self._check(u, v)
        return self._probe(int(u), int(v))

    def _probe(self, u: int, v: int) -> Relation:
        # Unchecked path for ids the caller already validated.
        i, j = u - 1, v - 1
        a, b = self._pos_list[i], self._pos_list[j]
        result = Relation.LESS if a < b else Relation.GREATER
        probed = self._probed
        if probed[i, j]:
            return result
        c = float(self.instance.costs[i, j])
        if c == math.inf:
            raise ForbiddenComparisonError(f"comparison ({u}, {v}) is not allowed")
        probed[i, j] = probed[j, i] = True
        self.total_cost += c
        self.probe_count += 1
        if a < b:
            self._lost[i] = True
            self._single.append((u, v, c))
            self._pending_pairs.append((a, b))
        else:
            self._lost[j] = True
            self._single.append((v, u, c))
            self._pending_pairs.append((b, a))
        self._pending_count += 1
        return result

    def probe_many(self, us, vs, distinct: bool = False) -> int:
        """Probe a batch of pairs; equivalent to probing them one by one.

        Returns the number of newly paid probes.  Nothing is charged if any
        pair in the batch is forbidden.  Pass ``distinct=True`` when the batch
        is known to hold no repeated pair.
        """
        us = np.asarray(us, dtype=np.int64).ravel()
        vs = np.asarray(vs, dtype=np.int64).ravel()
        if us.shape != vs.shape:
            raise ParameterError("us and vs must have the same length")
        if len(us) == 0:
            return 0
        if us.min() < 1 or vs.min() < 1 or us.max() > self.n or vs.max() > self.n:
            raise ParameterError("unknown element id in batch")
        if np.any(us == vs):
            raise ParameterError("cannot compare an element with itself")
        return self._probe_pairs(us - 1, vs - 1, distinct)

    def _probe_pairs(self, i: np.ndarray, j: np.ndarray, distinct: bool) -> int:
        # Unchecked batch path on zero-based ids.
        # Flat offsets into the n x n matrices are cheaper than paired fancy indexing.
        flat = i * self.n + j
        probed = self._probed.ravel()
        fresh = ~probed[flat]
        if not fresh.all():
            i, j, flat = i[fresh], j[fresh], flat[fresh]
        if not distinct:
            lo, hi = np.minimum(i, j), np.maximum(i, j)
            _, first = np.unique(lo * self.n + hi, return_index=True)
            i, j, flat = i[first], j[first], flat[first]
        if len(i) == 0:
            return 0
        c = self.instance.costs.ravel()[flat]
        if c.max() == math.inf:
            k = int(np.flatnonzero(np.isinf(c))[0])
            raise ForbiddenComparisonError(f"comparison ({i[k] + 1}, {j[k] + 1}) is not allowed")
        probed[flat] = True
        probed[j * self.n + i] = True
        self.total_cost += float(c.sum())
        self.probe_count += len(i)
        pi, pj = self._pos[i], self._pos[j]
        up = pi < pj
        small = np.where(up, i, j) + 1
        large = np.where(up, j, i) + 1
        self._lost[small - 1] = True
        self._chunks.append((small, large, c))
        self._pending_batches.append((np.where(up, pi, pj), np.where(up, pj, pi)))
        self._pending_count += len(i)
        return len(i)

    def _flush(self) -> None:
        if not self._pending_count:
            return
        L = self._less
        if self._pending_count > self._SWEEP_FACTOR * self.n:
            for a, b in self._pending_batches:
                L[a, b] = True
            for a, b in self._pending_pairs:
                L[a, b] = True
            close_positions(L)
        else:
            pairs = self._pending_pairs
            for aa, bb in self._pending_batches:
                pairs.extend(zip(aa.tolist(), bb.tolist()))
            for a, b in pairs:
                if L[a, b]:
                    continue
                # Rows already reaching b, and columns a already reaches, gain nothing.
                anc = np.append(np.flatnonzero(L[:, a] & ~L[:, b]), a)
                desc = np.append(np.flatnonzero(L[b] & ~L[a]), b)
                L[np.ix_(anc, desc)] = True
        self._pending_pairs = []
        self._pending_batches = []
        self._pending_count = 0

    # -- certificates ---------------------------------------------------

    def probed_edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Probed pairs as directed edges ``small -> large`` with costs."""
        if self._single:
            lo, hi, cost = zip(*self._single)
            self._chunks.append((np.array(lo, np.int64), np.array(hi, np.int64), np.array(cost)))
            self._single = []
        if not self._chunks:
            return np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0)
        if len(self._chunks) > 1:
            lo = np.concatenate([c[0] for c in self._chunks])
            hi = np.concatenate([c[1] for c in self._chunks])
            cost = np.concatenate([c[2] for c in self._chunks])
            self._chunks = [(lo, hi, cost)]
        return self._chunks[0]

    def snapshot_certificate(self, kind: CertificateKind | None = None) -> Certificate:
        lo, hi, cost = self.probed_edges()
        return Certificate(lo.copy(), hi.copy(), cost.copy(), kind)
