import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import closure_pairs
from pricedsort.errors import ForbiddenComparisonError, ParameterError
from pricedsort.instance import CostModel, RngStream, generate_instance, instance_from_order
from pricedsort.oracle import ProbeState, Relation, close_positions


def _chain(n, cost=0.5):
    costs = np.full((n, n), cost)
    return instance_from_order(list(range(1, n + 1)), costs, CostModel.uniform())


def test_probe_charges_once():
    s = ProbeState(_chain(3, 0.25))
    assert s.probe(1, 2) is Relation.LESS
    assert s.probe(2, 1) is Relation.GREATER
    assert s.total_cost == 0.25 and s.probe_count == 1
    assert s.is_probed(2, 1)


def test_transitivity_is_free():
    s = ProbeState(_chain(4))
    s.probe(1, 2)
    s.probe(2, 3)
    assert s.comparable(1, 3) is Relation.LESS
    assert s.comparable(3, 1) is Relation.GREATER
    assert s.comparable(1, 4) is Relation.UNKNOWN
    assert not s.is_probed(1, 3)
    assert s.probe_count == 2


def test_forbidden_probe_raises_without_charge():
    inst = instance_from_order([1, 2], [[0, math.inf], [math.inf, 0]], CostModel.unit_infinite(0.5))
    s = ProbeState(inst)
    with pytest.raises(ForbiddenComparisonError):
        s.probe(1, 2)
    with pytest.raises(ForbiddenComparisonError):
        s.probe_many([1], [2])
    assert s.total_cost == 0 and s.probe_count == 0


def test_bad_ids():
    s = ProbeState(_chain(3))
    for u, v in [(0, 1), (1, 4), (2, 2)]:
        with pytest.raises(ParameterError):
            s.probe(u, v)
    with pytest.raises(ParameterError):
        s.probe_many([1, 2], [3])


def test_probe_many_matches_sequential():
    inst = generate_instance(25, CostModel.uniform(), RngStream(4))
    rng = np.random.default_rng(0)
    us = rng.integers(1, 26, 200)
    vs = rng.integers(1, 26, 200)
    keep = us != vs
    us, vs = us[keep], vs[keep]
    a, b = ProbeState(inst), ProbeState(inst)
    a.probe_many(us, vs)
    for u, v in zip(us.tolist(), vs.tolist()):
        b.probe(u, v)
    assert a.probe_count == b.probe_count
    assert math.isclose(a.total_cost, b.total_cost)
    assert np.array_equal(a.known_matrix(), b.known_matrix())
    assert sorted(a.snapshot_certificate().edges()) == sorted(b.snapshot_certificate().edges())


def test_counts_and_extremes():
    s = ProbeState(_chain(5))
    s.probe(1, 2)
    s.probe(2, 3)
    s.probe(4, 5)
    assert s.below_counts().tolist() == [0, 1, 2, 0, 1]
    assert s.above_counts().tolist() == [2, 1, 0, 1, 0]
    assert s.maximal_among([1, 2, 3, 4, 5]).tolist() == [3, 5]
    assert s.minimal_among([1, 2, 3, 4, 5]).tolist() == [1, 4]
    assert s.relations_to(2, [1, 3, 4]).tolist() == [-1, 1, 0]


def test_close_positions_simple():
    L = np.zeros((4, 4), dtype=bool)
    L[0, 1] = L[1, 2] = L[2, 3] = True
    close_positions(L)
    assert L[np.triu_indices(4, 1)].all()


@settings(max_examples=150, deadline=None)
@given(
    n=st.integers(2, 8),
    seed=st.integers(0, 10_000),
    batch=st.booleans(),
)
def test_incremental_closure_matches_scratch(n, seed, batch):
    inst = generate_instance(n, CostModel.uniform(), RngStream(seed))
    rng = np.random.default_rng(seed)
    pairs = [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)]
    rng.shuffle(pairs)
    s = ProbeState(inst)
    edges = []
    chunk = 3 if batch else 1
    for start in range(0, len(pairs), chunk):
        part = pairs[start:start + chunk]
        if batch:
            s.probe_many([p[0] for p in part], [p[1] for p in part])
        else:
            s.probe(*part[0])
        for u, v in part:
            edges.append((u, v) if inst.rank_of(u) < inst.rank_of(v) else (v, u))
        expected = closure_pairs(edges)
        got = {
            (a, b)
            for a in range(1, n + 1)
            for b in range(1, n + 1)
            if a != b and s.comparable(a, b) is Relation.LESS
        }
        assert got == expected
