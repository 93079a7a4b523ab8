import json
import math
from fractions import Fraction

import numpy as np
import pytest

import oracles
from pricedsort.certificates import agrees_with, verify_sort
from pricedsort.errors import ParameterError, SizeError
from pricedsort.extensions import (
    Poset,
    balanced_pair_sort,
    balanced_probe_target,
    count_linear_extensions,
    expected_extensions,
    precedence_counts,
)
from pricedsort.instance import CostModel, RngStream, generate_instance, instance_from_order
from pricedsort.oracle import ProbeState


def test_small_counts():
    assert count_linear_extensions(Poset.antichain(3)) == 6
    chain = np.triu(np.ones((5, 5), dtype=bool), 1)
    assert count_linear_extensions(Poset.from_matrix(chain)) == 1
    M = np.zeros((4, 4), dtype=bool)
    M[0, 1] = True
    assert count_linear_extensions(Poset.from_matrix(M)) == 12


def test_counts_match_enumeration():
    rng = np.random.default_rng(3)
    for _ in range(500):
        n = int(rng.integers(1, 8))
        M = oracles.random_order(rng, n, float(rng.random()))
        assert count_linear_extensions(Poset.from_matrix(M)) == oracles.count_extensions(M)


def test_precedence_matches_enumeration():
    rng = np.random.default_rng(4)
    for _ in range(60):
        n = int(rng.integers(1, 7))
        M = oracles.random_order(rng, n, 0.3)
        C = precedence_counts(Poset.from_matrix(M))
        assert np.array_equal(C, oracles.precedence(M))
        e = count_linear_extensions(Poset.from_matrix(M))
        off = ~np.eye(n, dtype=bool)
        assert np.array_equal((C + C.T)[off], np.full(n * n - n, e))


def test_from_matrix_closes_and_rejects_cycles():
    M = np.zeros((3, 3), dtype=bool)
    M[0, 1] = M[1, 2] = True
    P = Poset.from_matrix(M)
    assert P.less(0, 2) and P.is_total()
    M[2, 0] = True
    with pytest.raises(ParameterError):
        Poset.from_matrix(M)


def test_size_limit():
    with pytest.raises(SizeError):
        count_linear_extensions(Poset.antichain(13))
    assert count_linear_extensions(Poset.antichain(8)) == math.factorial(8)


@pytest.mark.parametrize("n,p", [(1, 0.3), (4, 1.0), (6, 0.5), (10, 0.2)])
def test_expected_extensions_product(n, p):
    ref = oracles.expected_extensions(n, Fraction(p).limit_denominator(1000))
    assert expected_extensions(n, p) == pytest.approx(float(ref), rel=1e-12)
    assert expected_extensions(n, p) <= p ** -(n - 1) * (1 + 1e-12)


def test_expected_extensions_known_values():
    assert expected_extensions(1, 0.37) == 1
    assert expected_extensions(9, 1.0) == 1
    assert expected_extensions(6, 0.5) == pytest.approx(18.774, abs=5e-4)
    with pytest.raises(ParameterError):
        expected_extensions(3, 0.0)


def _boolean(n, p, t, seed=21):
    return generate_instance(n, CostModel.boolean(p), RngStream(seed, t))


def test_balanced_sort_total_poset_needs_no_probes():
    order, _, trace = balanced_pair_sort(ProbeState(_boolean(6, 1.0, 0)))
    assert trace == []


def test_balanced_sort_two_elements():
    inst = instance_from_order([2, 1], [[0, 1], [1, 0]], CostModel.boolean(0.5))
    s = ProbeState(inst)
    order, cert, trace = balanced_pair_sort(s)
    assert order == [2, 1] and s.probe_count == 1
    assert trace[0]["fraction"] == 0.5


def test_balanced_sort_correct_with_consistent_trace():
    for t in range(40):
        inst = _boolean(8, 0.3, t)
        s = ProbeState(inst)
        order, cert, trace = balanced_pair_sort(s)
        assert order == inst.by_rank.tolist()
        assert verify_sort(cert, order) and agrees_with(cert, inst)
        json.dumps(trace)
        for step in trace:
            assert step["if_less"] + step["if_greater"] == step["before"]
            assert step["after"] in (step["if_less"], step["if_greater"])
        for a, b in zip(trace, trace[1:]):
            assert b["before"] == a["after"]


def test_balanced_sort_needs_boolean_model_and_small_n():
    with pytest.raises(ParameterError):
        balanced_pair_sort(ProbeState(generate_instance(4, CostModel.uniform(), RngStream(0))))
    with pytest.raises(SizeError):
        balanced_pair_sort(ProbeState(_boolean(13, 0.5, 0)))


def test_probe_target():
    assert balanced_probe_target(1) == 0
    assert balanced_probe_target(2) == 2
    assert balanced_probe_target(6) == math.ceil(math.log(6, 1.5))
