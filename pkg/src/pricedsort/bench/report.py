"""Group statistics, closed-form comparisons and the summary table."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np
from scipy import stats

from pricedsort.bench.harness import ExperimentConfig, TrialRecord, run_experiment
from pricedsort.bounds import BOUNDS, bound
from pricedsort.errors import ConfigError, ParameterError

RULES = ("upper", "lower", "expect")


@dataclass(frozen=True)
class Binding:
    """Compare a column's group mean with a named closed form.

    ``upper`` passes when mean <= bound + band, ``lower`` when
    mean >= bound - band, ``expect`` when |mean - bound| <= band, where band
    is 3 standard errors plus ``slack`` (a number or another bound's name).
    """

    name: str
    rule: str = "upper"
    column: str = "cost"
    slack: float | str = 0.0

    def __post_init__(self) -> None:
        if self.name not in BOUNDS and self.name != "harmonic":
            raise ConfigError(f"unknown bound {self.name!r}")
        if self.rule not in RULES:
            raise ConfigError(f"unknown rule {self.rule!r}")
        if self.column not in ("cost", "min_cert"):
            raise ConfigError(f"unknown column {self.column!r}")
        if isinstance(self.slack, str) and self.slack not in BOUNDS:
            raise ConfigError(f"unknown slack bound {self.slack!r}")


DEFAULT_BINDINGS: dict[tuple[str, str], tuple[Binding, ...]] = {
    ("uniform", "find-max"): (Binding("uniform_findmax_bound", "upper"),),
    ("uniform", "selection"): (Binding("rank_cert_expect", "expect", "min_cert"),),
    ("uniform", "rank-cert"): (Binding("rank_cert_expect", "expect", "min_cert"),),
    ("uniform", "sort"): (Binding("uniform_sortcert_expect", "expect", "min_cert"),),
    ("boolean", "find-max"): (
        Binding("boolean_findmax_limit", "expect", slack="boolean_findmax_gap"),
    ),
    ("boolean", "sort"): (Binding("boolean_sort_bound", "upper"),),
    ("boolean", "repeated-max-sort"): (
        Binding("boolean_repeated_max_bound", "upper"),
        Binding("boolean_sortcert_expect", "expect", "min_cert"),
    ),
    ("boolean", "balanced-sort"): (Binding("boolean_sort_bound", "upper"),),
    ("unit-inf", "find-maximal"): (Binding("poset_findmax_upper", "upper"),),
    ("unit-inf", "find-all-maximal"): (
        Binding("poset_allmax_upper", "upper"),
        Binding("poset_allmax_lower", "lower"),
    ),
}


@dataclass(frozen=True)
class SummaryRow:
    model: str
    algorithm: str
    n: int
    p: float | None
    k: int | None
    trials: int
    mean_cost: float
    std: float
    stderr: float
    ci95: float
    mean_min_cert: float | None
    bound_name: str | None
    bound_value: float | None
    column: str | None
    rule: str | None
    all_valid: bool
    passed: bool

    def to_json(self) -> dict:
        return asdict(self)


def _stats(values: np.ndarray) -> tuple[float, float, float, float]:
    m = len(values)
    mean = math.fsum(values) / m
    if m == 1:
        return mean, 0.0, 0.0, 0.0
    std = float(np.std(values, ddof=1))
    se = std / math.sqrt(m)
    return mean, std, se, float(stats.t.ppf(0.975, m - 1)) * se


def check(rule: str, mean: float, target: float, band: float) -> bool:
    if rule == "upper":
        return mean <= target + band
    if rule == "lower":
        return mean >= target - band
    return abs(mean - target) <= band


def summarize(
    records: Iterable[TrialRecord],
    bindings: dict[tuple[str, str], Iterable[Binding]] | None = None,
) -> list[SummaryRow]:
    """One row per (group, binding); groups without a binding get one unbound row.

    Every row also requires all certificates and outputs in its group to be valid.
    """
    bindings = DEFAULT_BINDINGS if bindings is None else bindings
    groups: dict[tuple, list[TrialRecord]] = {}
    for r in records:
        groups.setdefault(r.group, []).append(r)
    rows = []
    for key in sorted(groups, key=lambda g: groups[g][0].sort_key()):
        recs = groups[key]
        model, alg, n, p, k = key
        costs = np.array([r.cost for r in recs])
        mean, std, se, ci = _stats(costs)
        certs = [r.min_cert_cost for r in recs]
        have_cert = all(c is not None for c in certs)
        cert_mean, cert_se = None, 0.0
        if have_cert:
            cert_mean, _, cert_se, _ = _stats(np.array(certs, dtype=float))
        valid = all(r.cert_valid and r.output_correct for r in recs)
        common = dict(
            model=model, algorithm=alg, n=n, p=p, k=k, trials=len(recs),
            mean_cost=mean, std=std, stderr=se, ci95=ci, mean_min_cert=cert_mean,
            all_valid=valid,
        )
        bound_list = list(bindings.get((model, alg), ()))
        if not bound_list:
            rows.append(SummaryRow(**common, bound_name=None, bound_value=None,
                                   column=None, rule=None, passed=valid))
            continue
        for b in bound_list:
            try:
                target = bound(b.name, n, p, k)
                slack = bound(b.slack, n, p, k) if isinstance(b.slack, str) else float(b.slack)
            except ParameterError as exc:
                raise ConfigError(str(exc)) from None
            if b.column == "cost":
                ok = check(b.rule, mean, target, 3.0 * se + slack)
            elif cert_mean is None:
                ok = False
            else:
                ok = check(b.rule, cert_mean, target, 3.0 * cert_se + slack)
            rows.append(SummaryRow(**common, bound_name=b.name, bound_value=target,
                                   column=b.column, rule=b.rule, passed=valid and ok))
    return rows


def format_summary(rows: list[SummaryRow]) -> str:
    head = f"{'model':9} {'algorithm':18} {'n':>5} {'p':>5} {'k':>5} {'trials':>6} {'mean':>10} {'stderr':>8} {'min_cert':>9} {'bound':>26} {'value':>9}  result"
    lines = [head]
    for r in rows:
        p = "-" if r.p is None else f"{r.p:g}"
        k = "-" if r.k is None else str(r.k)
        mc = "-" if r.mean_min_cert is None else f"{r.mean_min_cert:.4g}"
        bn = "-" if r.bound_name is None else f"{r.bound_name}[{r.column}]"
        bv = "-" if r.bound_value is None else f"{r.bound_value:.4g}"
        lines.append(
            f"{r.model:9} {r.algorithm:18} {r.n:>5} {p:>5} {k:>5} {r.trials:>6} "
            f"{r.mean_cost:>10.4g} {r.stderr:>8.3g} {mc:>9} {bn:>26} {bv:>9}  "
            + ("PASS" if r.passed else "FAIL")
        )
    return "\n".join(lines)


# -- summary table at p = 1/2 ------------------------------------------------------

TABLE_SIZES = (64, 128, 256)
TABLE_P = 0.5

# Largest acceptable mean ratio per doubling of n for each claimed growth class.
GROWTH_LIMITS = {"O(1)": 1.25, "O(log n)": 1.5, "polylog": 2.0, "O(n)": 2.5, "O(n log n)": 2.75}

# (model, problem) -> (algorithm, growth class, closed form for the algorithm or None,
#                      closed form for the minimum certificate or None)
TABLE_CELLS = {
    ("uniform", "max"): ("find-max", "O(log n)", "uniform_findmax_bound", "rank_cert_expect@n"),
    ("uniform", "selection"): ("selection", "polylog", None, "rank_cert_expect"),
    ("uniform", "sort"): ("sort", "O(n)", None, "uniform_sortcert_expect"),
    ("boolean", "max"): ("find-max", "O(1)", "boolean_findmax_limit", None),
    ("boolean", "selection"): ("selection", "O(log n)", None, None),
    ("boolean", "sort"): ("sort", "O(n)", "boolean_sort_bound", "boolean_sortcert_expect"),
    ("unit-inf", "max"): ("find-all-maximal", "O(n log n)", "poset_allmax_upper", None),
}
# Closed-form lower bounds on an algorithm's expected cost.
TABLE_LOWER = {("unit-inf", "max"): "poset_allmax_lower"}
TABLE_MODELS = ("uniform", "boolean", "unit-inf")
TABLE_PROBLEMS = ("max", "selection", "sort")


def doubling_ratios(rows: list[SummaryRow]) -> tuple[list[float], list[float]]:
    """Ratios of consecutive group means with first-order standard errors."""
    ratios, errs = [], []
    for a, b in zip(rows, rows[1:]):
        if a.mean_cost <= 0:
            ratios.append(1.0 if b.mean_cost == 0 else math.inf)
            errs.append(0.0)
            continue
        r = b.mean_cost / a.mean_cost
        rel_b = b.stderr / b.mean_cost if b.mean_cost > 0 else 0.0
        ratios.append(r)
        errs.append(r * math.hypot(a.stderr / a.mean_cost, rel_b))
    return ratios, errs


def table1_report(root_seed: int, trials: int = 200, workers: int = 1, alpha_coeff: float = 0.1) -> dict:
    """Measured means against the closed forms and growth classes at p = 1/2.

    Growth verdicts compare mean costs across doublings of n, allowing three
    standard errors of the ratio; they are heuristic evidence for the
    asymptotic class, not a proof of it.
    """
    cells = []
    for model in TABLE_MODELS:
        for problem in TABLE_PROBLEMS:
            cell_def = TABLE_CELLS.get((model, problem))
            if cell_def is None:
                cells.append({"model": model, "problem": problem, "status": "-"})
                continue
            alg, growth, alg_bound, cert_bound = cell_def
            config = ExperimentConfig(
                model=model, algorithm=alg, n_values=TABLE_SIZES, p_values=(TABLE_P,),
                k_spec="n/2", trials=trials, root_seed=root_seed, workers=workers,
                alpha_coeff=alpha_coeff,
            )
            rows = summarize(run_experiment(config), {})
            ratios, ratio_se = doubling_ratios(rows)
            limit = GROWTH_LIMITS[growth]
            growth_ok = all(r - 3.0 * se <= limit for r, se in zip(ratios, ratio_se))
            sizes = []
            for r in rows:
                entry = {
                    "n": r.n, "mean_cost": r.mean_cost, "stderr": r.stderr,
                    "mean_min_cert": r.mean_min_cert, "all_valid": r.all_valid,
                }
                k = r.k if r.k is not None else r.n
                p = None if model == "uniform" else TABLE_P
                if alg_bound:
                    entry["alg_closed_form"] = bound(alg_bound, r.n, p, k)
                if (model, problem) in TABLE_LOWER:
                    entry["alg_lower_bound"] = bound(TABLE_LOWER[model, problem], r.n, p, k)
                if cert_bound:
                    name, _, at = cert_bound.partition("@")
                    entry["cert_closed_form"] = bound(name, r.n, p, r.n if at == "n" else k)
                sizes.append(entry)
            cells.append({
                "model": model, "problem": problem, "algorithm": alg, "status": "run",
                "growth_class": growth, "ratio_limit": limit, "doubling_ratios": ratios,
                "ratio_stderr": ratio_se,
                "growth_pass": growth_ok, "valid": all(r.all_valid for r in rows),
                "sizes": sizes,
            })
    passed = all(c["growth_pass"] and c["valid"] for c in cells if c["status"] == "run")
    return {
        "p": TABLE_P, "sizes": list(TABLE_SIZES), "root_seed": root_seed, "trials": trials,
        "alpha_coeff": alpha_coeff, "growth_checks": "heuristic doubling-ratio checks",
        "cells": cells, "passed": passed,
    }


def format_table1(report: dict) -> str:
    lines = [f"p = {report['p']}, n in {report['sizes']}, {report['trials']} trials per size"]
    for c in report["cells"]:
        label = f"{c['model']:9} {c['problem']:10}"
        if c["status"] == "-":
            lines.append(f"{label} -")
            continue
        means = " ".join(f"{s['mean_cost']:.3g}" for s in c["sizes"])
        certs = " ".join("-" if s["mean_min_cert"] is None else f"{s['mean_min_cert']:.3g}" for s in c["sizes"])
        ratios = " ".join(f"{x:.2f}+-{e:.2f}" for x, e in zip(c["doubling_ratios"], c["ratio_stderr"]))
        verdict = "PASS" if c["growth_pass"] and c["valid"] else "FAIL"
        lines.append(
            f"{label} {c['algorithm']:17} cost [{means}]  min cert [{certs}]  "
            f"ratios [{ratios}] vs {c['growth_class']} <= {c['ratio_limit']}  {verdict}"
        )
    return "\n".join(lines)
