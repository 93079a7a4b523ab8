"""Certificates: edge sets whose transitive closure proves an answer.

A certificate is stored as parallel arrays of directed edges ``lo -> hi``
(meaning ``lo < hi``) with their costs, so it can be checked and serialized
without the instance it came from.  ``kind`` records what it claims to prove.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order

from pricedsort.errors import InvalidCertificateError, ParameterError, SizeError
from pricedsort.instance import Instance


@dataclass(frozen=True)
class Sort:
    order: tuple[int, ...] | None = None


@dataclass(frozen=True)
class Rank:
    k: int
    element: int


@dataclass(frozen=True)
class MaxTree:
    element: int


@dataclass(frozen=True)
class Maximal:
    """A single element maximal in the allowed-comparison poset."""

    element: int


@dataclass(frozen=True)
class MaximalSet:
    members: frozenset[int]


CertificateKind = Union[Sort, Rank, MaxTree, Maximal, MaximalSet]


@dataclass(eq=False)
class Certificate:
    lo: np.ndarray
    hi: np.ndarray
    costs: np.ndarray
    kind: CertificateKind | None = None

    def __post_init__(self) -> None:
        self.lo = np.asarray(self.lo, dtype=np.int64).ravel()
        self.hi = np.asarray(self.hi, dtype=np.int64).ravel()
        self.costs = np.asarray(self.costs, dtype=float).ravel()
        if not (len(self.lo) == len(self.hi) == len(self.costs)):
            raise ParameterError("edge arrays must have equal length")

    @classmethod
    def from_edges(cls, edges, kind: CertificateKind | None = None) -> Certificate:
        edges = list(edges)
        if not edges:
            return cls(np.zeros(0), np.zeros(0), np.zeros(0), kind)
        lo, hi, cost = zip(*edges)
        return cls(np.array(lo), np.array(hi), np.array(cost), kind)

    def __len__(self) -> int:
        return len(self.lo)

    @property
    def cost(self) -> float:
        return math.fsum(self.costs.tolist())

    def edges(self) -> list[tuple[int, int, float]]:
        return list(zip(self.lo.tolist(), self.hi.tolist(), self.costs.tolist()))

    def with_kind(self, kind: CertificateKind) -> Certificate:
        return Certificate(self.lo, self.hi, self.costs, kind)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": None}
        kind = self.kind
        if isinstance(kind, Sort):
            out["kind"] = "sort"
            if kind.order is not None:
                out["order"] = list(kind.order)
        elif isinstance(kind, Rank):
            out.update(kind="rank", k=kind.k, element=kind.element)
        elif isinstance(kind, MaxTree):
            out.update(kind="max-tree", element=kind.element)
        elif isinstance(kind, Maximal):
            out.update(kind="maximal", element=kind.element)
        elif isinstance(kind, MaximalSet):
            out.update(kind="maximal-set", set=sorted(kind.members))
        out["edges"] = [
            [u, v, "inf" if math.isinf(c) else c] for u, v, c in self.edges()
        ]
        return out

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> Certificate:
        name = data.get("kind")
        kind: CertificateKind | None
        if name is None:
            kind = None
        elif name == "sort":
            order = data.get("order")
            kind = Sort(tuple(order) if order is not None else None)
        elif name == "rank":
            kind = Rank(int(data["k"]), int(data["element"]))
        elif name == "max-tree":
            kind = MaxTree(int(data["element"]))
        elif name == "maximal":
            kind = Maximal(int(data["element"]))
        elif name == "maximal-set":
            kind = MaximalSet(frozenset(int(x) for x in data["set"]))
        else:
            raise ParameterError(f"unknown certificate kind {name!r}")
        edges = [(int(u), int(v), math.inf if c == "inf" else float(c)) for u, v, c in data["edges"]]
        return cls.from_edges(edges, kind)


# -- closure helpers ------------------------------------------------------------


# Above this size reachability uses a sparse graph instead of a dense matrix.
DENSE_LIMIT = 8192


class _Digraph:
    """Certificate edges with forward and backward reachability queries."""

    def __init__(self, cert: Certificate, n: int):
        if len(cert) and (cert.lo.min() < 1 or cert.hi.min() < 1 or max(cert.lo.max(), cert.hi.max()) > n):
            raise InvalidCertificateError(f"certificate mentions an element outside 1..{n}")
        self.n = n
        self._dense = n <= DENSE_LIMIT
        if self._dense:
            self._fwd = np.zeros((n, n), dtype=bool)
            self._fwd[cert.lo - 1, cert.hi - 1] = True
        else:
            ones = np.ones(len(cert), dtype=np.int8)
            self._fwd = csr_matrix((ones, (cert.lo - 1, cert.hi - 1)), shape=(n, n))
        self._bwd = None

    def reach(self, start: int, backward: bool = False) -> np.ndarray:
        """Zero-based nodes reachable from zero-based ``start`` (excluding itself)."""
        if backward:
            if self._bwd is None:
                self._bwd = self._fwd.T.copy() if self._dense else self._fwd.T.tocsr()
            graph = self._bwd
        else:
            graph = self._fwd
        if not self._dense:
            nodes = breadth_first_order(graph, start, directed=True, return_predecessors=False)
            return nodes[nodes != start]
        seen = np.zeros(self.n, dtype=bool)
        frontier = np.array([start])
        while frontier.size:
            step = graph[frontier].any(axis=0)
            step &= ~seen
            seen |= step
            frontier = np.flatnonzero(step)
        seen[start] = False
        return np.flatnonzero(seen)


def closure_matrix(cert: Certificate, n: int) -> np.ndarray:
    """Dense reachability ``R[a, b]`` (zero-based) over the certificate edges."""
    graph = _Digraph(cert, n)
    R = np.zeros((n, n), dtype=bool)
    for a in range(n):
        R[a, graph.reach(a)] = True
    return R


def agrees_with(cert: Certificate, instance: Instance) -> bool:
    """Every edge points the true way and carries the instance's cost."""
    if len(cert) == 0:
        return True
    n = instance.n
    if cert.lo.min() < 1 or cert.hi.min() < 1 or max(cert.lo.max(), cert.hi.max()) > n:
        return False
    if np.any(cert.lo == cert.hi):
        return False
    order = instance.order
    if not np.all(order[cert.lo - 1] < order[cert.hi - 1]):
        return False
    return bool(np.array_equal(instance.costs[cert.lo - 1, cert.hi - 1], cert.costs))


# -- verification ---------------------------------------------------------------


def verify_sort(cert: Certificate, claimed_order) -> bool:
    """True iff every adjacent pair of ``claimed_order`` is implied by ``cert``."""
    claimed = [int(x) for x in claimed_order]
    n = len(claimed)
    if sorted(claimed) != list(range(1, n + 1)):
        raise ParameterError("claimed_order must be a permutation of 1..n")
    if n == 1:
        return True
    graph = _Digraph(cert, n)
    pos = np.empty(n + 1, dtype=np.int64)
    pos[claimed] = np.arange(n)
    plo, phi = pos[cert.lo], pos[cert.hi]
    if np.all(plo < phi):
        # Paths move strictly forward, so adjacent pairs need a direct edge.
        covered = np.zeros(n - 1, dtype=bool)
        covered[plo[phi == plo + 1]] = True
        return bool(covered.all())
    for a, b in zip(claimed, claimed[1:]):
        if b - 1 not in set(graph.reach(a - 1).tolist()):
            return False
    return True


def verify_rank(cert: Certificate, element: int, k: int, n: int) -> bool:
    """True iff ``element`` is certified above exactly k-1 and below exactly n-k elements."""
    if not 1 <= k <= n:
        raise ParameterError(f"k={k} outside 1..{n}")
    if not 1 <= element <= n:
        raise ParameterError(f"unknown element {element}")
    if n == 1:
        return True
    graph = _Digraph(cert, n)
    above = graph.reach(element - 1)
    below = graph.reach(element - 1, backward=True)
    if np.intersect1d(above, below).size:
        return False
    return len(below) == k - 1 and len(above) == n - k


def _check_allowed(cert: Certificate, instance: Instance) -> _Digraph:
    graph = _Digraph(cert, instance.n)
    if len(cert) and np.isinf(instance.costs[cert.lo - 1, cert.hi - 1]).any():
        raise InvalidCertificateError("certificate contains a forbidden comparison")
    return graph


def _beats_neighbours(graph: _Digraph, instance: Instance, m: int) -> bool:
    if graph.reach(m - 1).size:
        return False
    row = instance.costs[m - 1]
    neighbours = np.flatnonzero(np.isfinite(row))
    if neighbours.size == 0:
        return True
    below = np.zeros(instance.n, dtype=bool)
    below[graph.reach(m - 1, backward=True)] = True
    return bool(below[neighbours].all())


def verify_maximal(cert: Certificate, element: int, instance: Instance) -> bool:
    """True iff ``element`` beats every allowed neighbour, directly or transitively."""
    graph = _check_allowed(cert, instance)
    return _beats_neighbours(graph, instance, element)


def verify_maximal_set(cert: Certificate, claimed_set, instance: Instance) -> bool:
    """True iff the claimed set is exactly the certified maximal elements.

    Every outsider must be certified below some element, and every member
    must beat all of its allowed neighbours.
    """
    graph = _check_allowed(cert, instance)
    n = instance.n
    members = {int(x) for x in claimed_set}
    if not members <= set(range(1, n + 1)):
        raise ParameterError("claimed set mentions unknown elements")
    has_superior = np.zeros(n + 1, dtype=bool)
    has_superior[cert.lo] = True
    outsiders = [x for x in range(1, n + 1) if x not in members]
    if not has_superior[outsiders].all():
        return False
    return all(_beats_neighbours(graph, instance, m) for m in members)


# -- minimum certificates -------------------------------------------------------


def min_sort_certificate_cost(instance: Instance) -> float:
    """Cost of the Hamiltonian path through rank-adjacent pairs."""
    if instance.n == 1:
        return 0.0
    return float(np.diagonal(instance.rank_costs, 1).sum())


def min_rank_certificate_cost(instance: Instance, k: int) -> float:
    """Cheapest certificate that the rank-k element has rank k.

    Each element below ``v_k`` needs an edge into the window between it and
    ``v_k``; each element above needs an edge from the window below it.  The
    per-element window minima form a valid certificate and are disjoint.
    """
    n = instance.n
    if not 1 <= k <= n:
        raise ParameterError(f"k={k} outside 1..{n}")
    C = instance.rank_costs
    idx = np.arange(n)
    total = 0.0
    if k > 1:
        # Row i keeps the edges to i+1..k-1.
        fwd = np.where(idx[:k, None] < idx[None, :k], C[:k, :k], math.inf)
        total += math.fsum(fwd[:-1].min(axis=1).tolist())
    if k < n:
        # Row j (above the window start) keeps the edges to k-1..j-1.
        bwd = np.where(idx[k - 1:, None] > idx[None, k - 1:], C[k - 1:, k - 1:], math.inf)
        total += math.fsum(bwd[1:].min(axis=1).tolist())
    return total


BRUTE_FORCE_MAX_N = 7


def brute_force_min_costs(instance: Instance) -> tuple[float, list[float]]:
    """Minimum sort and rank-k certificate costs by enumerating edge subsets.

    Returns ``(sort_cost, [rank_cost(k) for k in 1..n])``.  Closures of all
    subsets of the finite edges are built incrementally, one edge at a time,
    as bit matrices packed into 64-bit words.
    """
    n = instance.n
    if n > BRUTE_FORCE_MAX_N:
        raise SizeError(f"brute force needs n <= {BRUTE_FORCE_MAX_N}, got {n}")
    if n == 1:
        return 0.0, [0.0]
    C = instance.rank_costs
    edges = [(a, b, C[a, b]) for a in range(n) for b in range(a + 1, n) if math.isfinite(C[a, b])]
    m = len(edges)
    one = np.uint64(1)
    row_mask = np.uint64((1 << n) - 1)

    def bit(a: int, b: int) -> np.uint64:
        return np.uint64(1 << (a * n + b))

    closure = np.zeros(1 << m, dtype=np.uint64)
    cost = np.zeros(1 << m)
    for e, (a, b, c) in enumerate(edges):
        half = 1 << e
        base = closure[:half]
        grown = base.copy()
        desc = ((base >> np.uint64(b * n)) & row_mask) | np.uint64(1 << b)
        for x in range(n):
            if x == a:
                grown |= desc << np.uint64(x * n)
            else:
                reaches_a = ((base >> np.uint64(x * n + a)) & one).astype(bool)
                grown |= np.where(reaches_a, desc << np.uint64(x * n), np.uint64(0))
        closure[half:2 * half] = grown
        cost[half:2 * half] = cost[:half] + c

    def cheapest(mask: np.uint64) -> float:
        ok = (closure & mask) == mask
        return float(cost[ok].min()) if ok.any() else math.inf

    sort_mask = np.uint64(0)
    for i in range(n - 1):
        sort_mask |= bit(i, i + 1)
    ranks = []
    for t in range(n):
        mask = np.uint64(0)
        for i in range(n):
            if i < t:
                mask |= bit(i, t)
            elif i > t:
                mask |= bit(t, i)
        ranks.append(cheapest(mask))
    return cheapest(sort_mask), ranks


def brute_force_min_certificate(instance: Instance, k: int | None = None) -> float:
    """Brute-force minimum certificate: sorting when ``k`` is None, else rank ``k``."""
    if k is not None and not 1 <= k <= instance.n:
        raise ParameterError(f"k={k} outside 1..{instance.n}")
    sort_cost, ranks = brute_force_min_costs(instance)
    return sort_cost if k is None else ranks[k - 1]
