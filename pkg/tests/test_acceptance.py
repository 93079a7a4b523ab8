"""End-to-end acceptance checks.

Each test is one criterion.  Statistical checks use seeded trials and bands
of three standard errors; closed-form targets come from the exact rational
helpers in ``oracles``.  Wall-clock budgets are reported next to each
verdict rather than asserted, since timing depends on the host.
"""

from __future__ import annotations

import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest

import oracles
from pricedsort.bench.harness import ExperimentConfig, TrialRecord, run_experiment
from pricedsort.bounds import expected_extensions
from pricedsort.certificates import brute_force_min_costs, min_rank_certificate_cost, min_sort_certificate_cost
from pricedsort.extensions import Poset, count_linear_extensions
from pricedsort.boolean import probe_free
from pricedsort.instance import CostModel, RngStream, generate_instance
from pricedsort.oracle import ProbeState, Relation


def _mean_se(values) -> tuple[float, float]:
    x = np.asarray(values, dtype=float)
    if len(x) < 2:
        return float(x.mean()), 0.0
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(len(x)))


def _ratio_se(m1, s1, m2, s2) -> tuple[float, float]:
    """Ratio m2/m1 and its first-order standard error."""
    r = m2 / m1
    return r, r * math.sqrt((s1 / m1) ** 2 + (s2 / m2) ** 2)


class Verdict:
    """Accumulates a one-line detail and the elapsed time against a budget."""

    def __init__(self, record_property, budget_s: float):
        self.record = record_property
        self.budget = budget_s
        self.start = time.perf_counter()
        self.parts: list[str] = []

    def note(self, text: str) -> None:
        self.parts.append(text)
        self.flush()

    def flush(self) -> None:
        elapsed = time.perf_counter() - self.start
        timing = f"{elapsed:.1f}s of {self.budget:g}s budget"
        self.record("detail", "; ".join(self.parts + [timing]))


def _instances(n, model, seed, count):
    for t in range(count):
        yield generate_instance(n, model, RngStream(seed, t))


@pytest.mark.acceptance(1, "uniform find-max cost bound")
def test_c01_uniform_find_max(record_property):
    v = Verdict(record_property, 30)
    n, trials = 100, 20_000
    recs = run_experiment(ExperimentConfig("uniform", "find-max", (n,), trials=trials, root_seed=101))
    mean, se = _mean_se([r.cost for r in recs])
    bound = float(2 * (oracles.harmonic(n) - 1))
    probes = {r.probes for r in recs}
    valid = all(r.cert_valid and r.output_correct for r in recs)
    v.note(f"mean {mean:.4f} <= {bound:.4f} + {3 * se:.4f}; probe counts {sorted(probes)}; all valid {valid}")
    assert mean <= bound + 3 * se
    assert probes == {n - 1}
    assert valid


@pytest.mark.acceptance(2, "uniform min rank-k certificate expectation")
def test_c02_uniform_min_rank(record_property):
    v = Verdict(record_property, 30)
    n, k = 100, 50
    model = CostModel.uniform()
    values = [min_rank_certificate_cost(inst, k) for inst in _instances(n, model, 102, 20_000)]
    mean, se = _mean_se(values)
    target = float(oracles.harmonic(k) + oracles.harmonic(n - k + 1) - 2)
    v.note(f"mean {mean:.4f} vs {target:.4f} +- {3 * se:.4f}")
    assert abs(mean - target) <= 3 * se


@pytest.mark.acceptance(3, "uniform min sort certificate")
def test_c03_uniform_min_sort(record_property):
    v = Verdict(record_property, 30)
    n = 101
    values = [min_sort_certificate_cost(inst) for inst in _instances(n, CostModel.uniform(), 103, 20_000)]
    mean, se = _mean_se(values)
    target = (n - 1) / 2
    v.note(f"mean {mean:.4f} vs {target} +- {3 * se:.4f}")
    assert abs(mean - target) <= 3 * se


@pytest.mark.acceptance(4, "uniform sort linear growth")
def test_c04_uniform_sort_linear(record_property):
    v = Verdict(record_property, 300)
    sizes = (128, 256, 512)
    recs = run_experiment(
        ExperimentConfig("uniform", "sort", sizes, trials=500, root_seed=104, alpha_coeff=0.1)
    )
    assert all(r.cert_valid and r.output_correct for r in recs)
    stats = {}
    for n in sizes:
        stats[n] = _mean_se([r.cost / n for r in recs if r.n == n])
    ratios = []
    for a, b in zip(sizes, sizes[1:]):
        ratios.append(_ratio_se(*stats[a], *stats[b]))
    v.note("mean cost/n " + ", ".join(f"n={n}: {stats[n][0]:.3f}" for n in sizes))
    v.note("ratios " + ", ".join(f"{r:.3f} (se {s:.3f})" for r, s in ratios) + " <= 1.5")
    assert all(r <= 1.5 for r, _ in ratios)


@pytest.mark.acceptance(5, "uniform selection polylog growth")
def test_c05_uniform_selection_growth(record_property):
    v = Verdict(record_property, 300)
    sizes = (64, 128, 256)
    recs = run_experiment(
        ExperimentConfig("uniform", "selection", sizes, k_spec="n/2", trials=1000, root_seed=105, alpha_coeff=0.1)
    )
    valid = all(r.cert_valid and r.output_correct for r in recs)
    stats = {n: _mean_se([r.cost for r in recs if r.n == n]) for n in sizes}
    ratios = [_ratio_se(*stats[a], *stats[b]) for a, b in zip(sizes, sizes[1:])]
    v.note("mean cost " + ", ".join(f"n={n}: {stats[n][0]:.3f}" for n in sizes))
    v.note("ratios " + ", ".join(f"{r:.3f} (3se {3 * s:.3f})" for r, s in ratios) + " <= 2")
    v.note(f"all valid {valid}")
    assert valid
    assert all(r <= 2.0 for r, _ in ratios)


@pytest.mark.acceptance(6, "boolean find-max limit and survivors")
def test_c06_boolean_find_max(record_property):
    v = Verdict(record_property, 60)
    n, p = 200, 0.5
    recs = run_experiment(ExperimentConfig("boolean", "find-max", (n,), (p,), trials=20_000, root_seed=106))
    mean, se = _mean_se([r.cost for r in recs])
    gap = (1 - p) ** n / p
    surv, surv_se = _mean_se([r.extras["survivors"] for r in recs])
    surv_target = (1 - (1 - p) ** n) / p
    valid = all(r.cert_valid and r.output_correct for r in recs)
    v.note(f"cost {mean:.4f} vs {1 / p - 1:.4f} +- {3 * se + gap:.4f}")
    v.note(f"survivors {surv:.4f} vs {surv_target:.4f} +- {3 * surv_se:.4f}; all valid {valid}")
    assert abs(mean - (1 / p - 1)) <= 3 * se + gap
    assert abs(surv - surv_target) <= 3 * surv_se
    assert valid


@pytest.mark.acceptance(7, "boolean min sort certificate")
def test_c07_boolean_min_sort(record_property):
    v = Verdict(record_property, 30)
    n, p = 101, 0.5
    values = [min_sort_certificate_cost(inst) for inst in _instances(n, CostModel.boolean(p), 107, 20_000)]
    mean, se = _mean_se(values)
    target = (1 - p) * (n - 1)
    v.note(f"mean {mean:.4f} vs {target} +- {3 * se:.4f}")
    assert abs(mean - target) <= 3 * se


@pytest.mark.acceptance(8, "boolean repeated-max sort")
def test_c08_repeated_max(record_property):
    v = Verdict(record_property, 120)
    n, p = 200, 0.5
    recs = run_experiment(ExperimentConfig("boolean", "repeated-max-sort", (n,), (p,), trials=1000, root_seed=108))
    mean, se = _mean_se([r.cost for r in recs])
    bound = (1 / p - 1) * (n - 1)
    valid = all(r.cert_valid and r.output_correct for r in recs)
    v.note(f"mean {mean:.3f} <= {bound} + {3 * se:.3f}; all valid {valid}")
    assert mean <= bound + 3 * se
    assert valid


@pytest.mark.acceptance(9, "boolean selection grid, fallback rate and window growth")
def test_c09_boolean_selection(record_property):
    v = Verdict(record_property, 300)
    grid = [(256, 0.5, 20), (1024, 0.5, 10), (4096, 0.5, 6), (256, 0.9, 20), (1024, 0.9, 10)]
    recs: list[TrialRecord] = []
    for n, p, trials in grid:
        recs += run_experiment(
            ExperimentConfig("boolean", "selection", (n,), (p,), trials=trials, root_seed=109 + n)
        )
    # The growth check needs more trials at the two largest sizes.
    big = {
        n: run_experiment(ExperimentConfig("boolean", "selection", (n,), (0.9,), trials=36, root_seed=209 + n))
        for n in (2048, 4096)
    }
    everything = recs + big[2048] + big[4096]
    valid = all(r.cert_valid and r.output_correct for r in everything)
    fallback = np.mean([r.extras["fallback"] for r in big[4096]])
    stats = {n: _mean_se([r.cost / r.extras["w"] for r in rs]) for n, rs in big.items()}
    ratio, ratio_se = _ratio_se(*stats[2048], *stats[4096])
    v.note(f"{len(everything)} trials all valid {valid}")
    v.note(f"fallback rate at (4096, 0.9) {fallback:.3f} < 0.05")
    v.note(f"cost/w 2048: {stats[2048][0]:.3f}, 4096: {stats[4096][0]:.3f}, ratio {ratio:.3f} (se {ratio_se:.3f}) <= 2")
    assert valid
    assert fallback < 0.05
    assert ratio <= 2.0


@pytest.mark.acceptance(10, "expected linear extensions")
def test_c10_linear_extensions(record_property):
    v = Verdict(record_property, 60)
    n, p = 6, 0.5
    counts = []
    for inst in _instances(n, CostModel.boolean(p), 110, 20_000):
        state = ProbeState(inst)
        probe_free(state)
        counts.append(count_linear_extensions(Poset.from_state(state)))
    mean, se = _mean_se(counts)
    target = float(oracles.expected_extensions(n, Fraction(1, 2)))
    v.note(f"mean {mean:.4f} vs {target:.4f} +- {3 * se:.4f}")
    worst = []
    for m in range(1, 13):
        for q in np.linspace(0.05, 1.0, 20):
            e, cap = expected_extensions(m, float(q)), float(q) ** -(m - 1)
            if e > cap * (1 + 1e-12):
                worst.append((m, float(q), e, cap))
    v.note(f"sweep violations {worst}")
    assert abs(mean - target) <= 3 * se
    assert not worst


@pytest.mark.acceptance(11, "balanced-pair sorter audit")
def test_c11_balanced_sort(record_property):
    v = Verdict(record_property, 120)
    recs = run_experiment(ExperimentConfig("boolean", "balanced-sort", (8,), (0.3,), trials=200, root_seed=111))
    valid = all(r.cert_valid and r.output_correct for r in recs)
    violations = [
        (r.trial, step)
        for r in recs
        for step in r.extras["trace"]
        if not Fraction(1, 3) <= Fraction(step["if_less"], step["before"]) <= Fraction(2, 3)
    ]
    within = sum(r.extras["steps"] <= r.extras["target"] for r in recs)
    v.note(f"within probe target {within}/{len(recs)}; all valid {valid}")
    v.note(f"fraction violations {violations if violations else 'none'}")
    assert valid
    assert within >= 0.95 * len(recs)
    assert not violations


@pytest.mark.acceptance(12, "poset find-maximal")
def test_c12_find_maximal(record_property):
    v = Verdict(record_property, 30)
    n = 50
    recs = run_experiment(ExperimentConfig("unit-inf", "find-maximal", (n,), (0.2,), trials=10_000, root_seed=112))
    worst = max(r.probes for r in recs)
    valid = all(r.cert_valid and r.output_correct for r in recs)
    v.note(f"max probes {worst} <= {n - 1}; all maximal and valid {valid}")
    assert worst <= n - 1
    assert valid


@pytest.mark.acceptance(13, "poset find-all-maximal")
def test_c13_find_all_maximal(record_property):
    v = Verdict(record_property, 60)
    n, p = 100, 0.1
    recs = run_experiment(ExperimentConfig("unit-inf", "find-all-maximal", (n,), (p,), trials=2000, root_seed=113))
    exact = all(r.output_correct for r in recs)
    valid = all(r.cert_valid for r in recs)
    probes, _ = _mean_se([r.probes for r in recs])
    upper = (n - 1) * (float(oracles.harmonic(n - 1)) + 1)
    lower = (n - n * (1 - p) ** (n - 1)) / 2
    iso, iso_se = _mean_se([r.extras["isolated"] for r in recs])
    iso_target = n * (1 - p) ** (n - 1)
    v.note(f"sets exact {exact}, certs valid {valid}")
    v.note(f"mean probes {probes:.2f} in [{lower:.2f}, {upper:.2f}]")
    v.note(f"isolated {iso:.5f} vs {iso_target:.5f} +- {3 * iso_se:.5f}")
    assert exact and valid
    assert lower <= probes <= upper
    assert abs(iso - iso_target) <= 3 * iso_se


def _same_cost(a: float, b: float) -> bool:
    # Both sides add the same edge costs in different orders.
    return math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-12)


def _scratch_less(n, edges):
    less = np.zeros((n, n), dtype=bool)
    for a, b in edges:
        less[a - 1, b - 1] = True
    for m in range(n):
        less |= less[:, [m]] & less[[m], :]
    return less


@pytest.mark.acceptance(14, "oracle equivalence and incremental closure")
def test_c14_oracle_equivalence(record_property):
    v = Verdict(record_property, 300)
    models = [CostModel.uniform(), CostModel.boolean(0.5), CostModel.unit_infinite(0.6)]
    mismatches = []
    checked = 0
    for mi, model in enumerate(models):
        for n in range(2, 7):
            for inst in _instances(n, model, 1400 + 10 * mi + n, 500):
                sort_bf, ranks_bf = brute_force_min_costs(inst)
                if not _same_cost(sort_bf, min_sort_certificate_cost(inst)):
                    mismatches.append((model.variant.value, n, inst.seed, "sort"))
                for k in range(1, n + 1):
                    if not _same_cost(ranks_bf[k - 1], min_rank_certificate_cost(inst, k)):
                        mismatches.append((model.variant.value, n, inst.seed, k))
                checked += 1
    closure_bad = 0
    sequences = 0
    rng = np.random.default_rng(114)
    for n in range(2, 9):
        for inst in _instances(n, CostModel.uniform(), 1500 + n, 60):
            state = ProbeState(inst)
            pairs = list(itertools.combinations(range(1, n + 1), 2))
            edges = []
            for idx in rng.permutation(len(pairs)):
                u, w = pairs[idx]
                rel = state.probe(u, w)
                edges.append((u, w) if rel is Relation.LESS else (w, u))
                expect = _scratch_less(n, edges)
                if not np.array_equal(state.known_matrix(), expect):
                    closure_bad += 1
            sequences += 1
    v.note(f"{checked} instances, certificate mismatches {mismatches[:5] if mismatches else 0}")
    v.note(f"{sequences} probe sequences, closure mismatches {closure_bad}")
    assert not mismatches
    assert closure_bad == 0


@pytest.mark.acceptance(15, "determinism across worker counts")
def test_c15_determinism(record_property):
    v = Verdict(record_property, 60)
    configs = [
        dict(model="boolean", algorithm="selection", n_values=(64, 128), p_values=(0.5, 0.9), trials=20),
        dict(model="uniform", algorithm="sort", n_values=(32, 64), trials=20, alpha_coeff=0.1),
        dict(model="unit-inf", algorithm="find-all-maximal", n_values=(40,), p_values=(0.2,), trials=40),
    ]
    same = []
    for cfg in configs:
        one = run_experiment(ExperimentConfig(**cfg, root_seed=115, workers=1))
        eight = run_experiment(ExperimentConfig(**cfg, root_seed=115, workers=8))
        a = sorted(one, key=TrialRecord.sort_key)
        b = sorted(eight, key=TrialRecord.sort_key)
        same.append(a == b and [repr(r.cost) for r in a] == [repr(r.cost) for r in b])
    v.note(f"identical for {sum(same)}/{len(same)} experiments")
    assert all(same)
