"""Seeded Monte Carlo trials over (model, algorithm, n, p, k) grids."""

from __future__ import annotations

import csv
import io
import json
import math
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Callable

from pricedsort.boolean import (
    BooleanParams,
    boolean_find_max,
    boolean_selection,
    boolean_sort_repeated_max,
)
from pricedsort.bounds import log_base
from pricedsort.certificates import (
    Certificate,
    Rank,
    agrees_with,
    min_rank_certificate_cost,
    min_sort_certificate_cost,
    verify_maximal,
    verify_maximal_set,
    verify_rank,
    verify_sort,
)
from pricedsort.errors import ConfigError, ParameterError
from pricedsort.extensions import MAX_EXACT_N, balanced_pair_sort, balanced_probe_target
from pricedsort.instance import CostModel, CostVariant, Instance, RngStream, generate_instance
from pricedsort.oracle import ProbeState
from pricedsort.poset import exhaustive_maximal_set, isolated_count, poset_find_all_maximal, poset_find_maximal
from pricedsort.uniform import UniformParams, uniform_find_max, uniform_rank_certificate, uniform_selection, uniform_sort

ALGORITHMS: dict[str, tuple[str, ...]] = {
    "uniform": ("find-max", "selection", "sort", "rank-cert"),
    "boolean": ("find-max", "selection", "sort", "repeated-max-sort", "balanced-sort"),
    "unit-inf": ("find-maximal", "find-all-maximal"),
}
TAKES_K = ("selection", "rank-cert")

CSV_FIELDS = (
    "model", "algorithm", "n", "p", "k", "trial", "cost", "probes",
    "cert_valid", "output_correct", "min_cert_cost", "elapsed_us",
)


@dataclass(frozen=True)
class ExperimentConfig:
    model: str
    algorithm: str
    n_values: tuple[int, ...]
    p_values: tuple[float, ...] = (0.5,)
    k_spec: str = "n/2"
    trials: int = 100
    root_seed: int = 0
    workers: int = 1
    out: str | None = None
    format: str = "csv"
    alpha_coeff: float = UniformParams.alpha_coeff
    w_mode: str = "quadratic"
    dump_instances: str | None = None


@dataclass
class TrialRecord:
    model: str
    algorithm: str
    n: int
    p: float | None
    k: int | None
    trial: int
    cost: float
    probes: int
    cert_valid: bool
    output_correct: bool
    min_cert_cost: float | None
    elapsed_us: int = field(default=0, compare=False)
    extras: dict = field(default_factory=dict, compare=False)

    @property
    def group(self) -> tuple:
        return (self.model, self.algorithm, self.n, self.p, self.k)

    def sort_key(self) -> tuple:
        model, alg, n, p, k = self.group
        return (model, alg, n, -1.0 if p is None else p, -1 if k is None else k, self.trial)


def resolve_k(value: str | int, n: int) -> int:
    """``"n/2"`` style fractions are floored with a minimum of 1; ``"n"`` means n."""
    text = str(value).strip().replace(" ", "")
    if text == "n":
        return n
    m = re.fullmatch(r"n/(\d+)", text)
    if m:
        d = int(m.group(1))
        if d == 0:
            raise ConfigError("k fraction divides by zero")
        return max(1, n // d)
    try:
        k = int(text)
    except ValueError:
        raise ConfigError(f"cannot parse k {value!r}") from None
    if not 1 <= k <= n:
        raise ConfigError(f"k={k} outside 1..{n}")
    return k


def combinations(config: ExperimentConfig) -> list[tuple[int, float | None, int | None]]:
    """Validate the config and list its (n, p, k) combinations in run order."""
    if config.model not in ALGORITHMS:
        raise ConfigError(f"unknown model {config.model!r}")
    if config.algorithm not in ALGORITHMS[config.model]:
        raise ConfigError(f"algorithm {config.algorithm!r} is not available for model {config.model!r}")
    if config.trials < 1:
        raise ConfigError("trials must be >= 1")
    if config.workers < 1:
        raise ConfigError("workers must be >= 1")
    if config.format not in ("csv", "json"):
        raise ConfigError(f"unknown format {config.format!r}")
    if not config.n_values:
        raise ConfigError("no n values given")
    try:
        UniformParams(config.alpha_coeff)
        BooleanParams(config.w_mode)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from None
    ps: list[float | None] = [None] if config.model == "uniform" else list(config.p_values)
    if not ps:
        raise ConfigError("no p values given")
    out = []
    for n in config.n_values:
        if n < 1:
            raise ConfigError(f"n must be >= 1, got {n}")
        if config.algorithm == "balanced-sort" and n > MAX_EXACT_N:
            raise ConfigError(f"balanced-sort needs n <= {MAX_EXACT_N}")
        k = resolve_k(config.k_spec, n) if config.algorithm in TAKES_K else None
        for p in ps:
            if p is not None and not 0.0 < p <= 1.0:
                raise ConfigError(f"p must lie in (0, 1], got {p}")
            out.append((n, p, k))
    return out


# -- single trials --------------------------------------------------------------


def _is_max_certified(cert: Certificate, e: int, inst: Instance) -> bool:
    return verify_rank(cert, e, inst.n, inst.n) and agrees_with(cert, inst)


def _find_max(state, inst, k, cfg, rng, extras):
    if inst.model.variant is CostVariant.BOOLEAN:
        e, cert = boolean_find_max(state, extras)
    else:
        e, cert = uniform_find_max(state)
    ok = _is_max_certified(cert, e, inst)
    return cert, ok, e == inst.by_rank[-1], min_rank_certificate_cost(inst, inst.n)


def _selection(state, inst, k, cfg, rng, extras):
    if inst.model.variant is CostVariant.BOOLEAN:
        e, cert = boolean_selection(state, k, BooleanParams(cfg.w_mode), rng, extras)
        extras["fallback"] = bool(extras.get("fallback"))
    else:
        e, cert = uniform_selection(state, k, UniformParams(cfg.alpha_coeff), rng)
    ok = verify_rank(cert, e, k, inst.n) and agrees_with(cert, inst)
    return cert, ok, e == inst.by_rank[k - 1], min_rank_certificate_cost(inst, k)


def _rank_cert(state, inst, k, cfg, rng, extras):
    v = int(inst.by_rank[k - 1])
    split = uniform_rank_certificate(state, v, UniformParams(cfg.alpha_coeff))
    extras["bands"] = len(split.bands)
    cert = state.snapshot_certificate(Rank(k, v))
    ok = verify_rank(cert, v, k, inst.n) and agrees_with(cert, inst)
    correct = hasattr(split, "below") and sorted(split.below.tolist()) == sorted(inst.by_rank[: k - 1].tolist())
    return cert, ok, correct, min_rank_certificate_cost(inst, k)


def _sorted(order, cert, inst):
    ok = verify_sort(cert, order) and agrees_with(cert, inst)
    return cert, ok, list(order) == inst.by_rank.tolist(), min_sort_certificate_cost(inst)


def prefers_balanced(n: int, p: float) -> bool:
    """Use the balanced-pair sorter where its log_{11/8}(1/p) rate beats 1/p - 1."""
    if p >= 1.0 or n > MAX_EXACT_N:
        return False
    return log_base(1.0 / p, 11.0 / 8.0) < 1.0 / p - 1.0


def _sort(state, inst, k, cfg, rng, extras):
    if inst.model.variant is CostVariant.BOOLEAN:
        if prefers_balanced(inst.n, inst.model.p):
            return _balanced(state, inst, k, cfg, rng, extras)
        return _repeated_max(state, inst, k, cfg, rng, extras)
    order, cert = uniform_sort(state, UniformParams(cfg.alpha_coeff), rng)
    return _sorted(order, cert, inst)


def _repeated_max(state, inst, k, cfg, rng, extras):
    extras["method"] = "repeated-max"
    order, cert = boolean_sort_repeated_max(state)
    return _sorted(order, cert, inst)


def _balanced(state, inst, k, cfg, rng, extras):
    order, cert, trace = balanced_pair_sort(state)
    start = trace[0]["before"] if trace else 1
    extras.update(
        method="balanced",
        trace=trace,
        initial_extensions=start,
        steps=len(trace),
        target=balanced_probe_target(start),
    )
    return _sorted(order, cert, inst)


def _find_maximal(state, inst, k, cfg, rng, extras):
    e, cert = poset_find_maximal(state)
    ok = verify_maximal(cert, e, inst) and agrees_with(cert, inst)
    return cert, ok, e in exhaustive_maximal_set(inst), None


def _find_all_maximal(state, inst, k, cfg, rng, extras):
    found, cert = poset_find_all_maximal(state, rng)
    extras["isolated"] = isolated_count(inst)
    extras["maximal"] = len(found)
    ok = verify_maximal_set(cert, found, inst) and agrees_with(cert, inst)
    return cert, ok, found == exhaustive_maximal_set(inst), None


RUNNERS: dict[str, Callable] = {
    "find-max": _find_max,
    "selection": _selection,
    "rank-cert": _rank_cert,
    "sort": _sort,
    "repeated-max-sort": _repeated_max,
    "balanced-sort": _balanced,
    "find-maximal": _find_maximal,
    "find-all-maximal": _find_all_maximal,
}


def run_trial(config: ExperimentConfig, n: int, p: float | None, k: int | None, trial: int, ordinal: int) -> TrialRecord:
    """Run one seeded trial; the instance and algorithm streams depend only on ``ordinal``."""
    stream = RngStream(config.root_seed, ordinal)
    inst = generate_instance(n, CostModel.parse(config.model, p), stream)
    state = ProbeState(inst)
    extras: dict[str, Any] = {}
    start = time.perf_counter_ns()
    cert, ok, correct, min_cert = RUNNERS[config.algorithm](
        state, inst, k, config, stream.algorithm_rng(), extras
    )
    elapsed = (time.perf_counter_ns() - start) // 1000
    if min_cert is not None and math.isinf(min_cert):
        min_cert = None
    record = TrialRecord(
        model=config.model,
        algorithm=config.algorithm,
        n=n,
        p=p,
        k=k,
        trial=trial,
        cost=float(state.total_cost),
        probes=int(state.probe_count),
        cert_valid=bool(ok),
        output_correct=bool(correct),
        min_cert_cost=None if min_cert is None else float(min_cert),
        elapsed_us=int(elapsed),
        extras=extras,
    )
    if config.dump_instances:
        _dump(config.dump_instances, record, inst, cert)
    return record


def _dump(directory: str, record: TrialRecord, inst: Instance, cert: Certificate) -> None:
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    stem = f"{record.model}_{record.algorithm}_n{record.n}_p{record.p}_k{record.k}_t{record.trial}"
    (root / f"{stem}.instance.json").write_text(json.dumps(inst.to_json()))
    (root / f"{stem}.certificate.json").write_text(json.dumps(cert.to_json()))


def _run_chunk(args) -> list[TrialRecord]:
    config, tasks = args
    return [run_trial(config, *task) for task in tasks]


def run_experiment(config: ExperimentConfig) -> list[TrialRecord]:
    """One record per (combination, trial), in combination-then-trial order.

    Trial ``t`` of combination ``c`` uses the stream of ordinal ``c * trials + t``,
    so results do not depend on the number of workers.
    """
    combos = combinations(config)
    tasks = [
        (n, p, k, t, idx * config.trials + t)
        for idx, (n, p, k) in enumerate(combos)
        for t in range(config.trials)
    ]
    if config.workers == 1 or len(tasks) == 1:
        return [run_trial(config, *task) for task in tasks]
    size = max(1, math.ceil(len(tasks) / (config.workers * 4)))
    chunks = [(config, tasks[i:i + size]) for i in range(0, len(tasks), size)]
    workers = min(config.workers, len(chunks))
    out: list[TrialRecord] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_run_chunk, chunks):
            out.extend(part)
    return out


# -- serialization ---------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def records_to_csv(records: list[TrialRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in records:
        writer.writerow([_fmt(getattr(r, name)) for name in CSV_FIELDS])
    return buf.getvalue()


def _opt(cast):
    return lambda text: None if text == "" else cast(text)


def _flag(text: str) -> bool:
    if text not in ("true", "false"):
        raise ValueError(f"bad flag {text!r}")
    return text == "true"


_PARSERS = {
    "model": str, "algorithm": str, "n": int, "p": _opt(float), "k": _opt(int),
    "trial": int, "cost": float, "probes": int, "cert_valid": _flag,
    "output_correct": _flag, "min_cert_cost": _opt(float), "elapsed_us": int,
}


def records_from_csv(text: str) -> list[TrialRecord]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_FIELDS:
        raise ValueError("unexpected CSV header")
    return [TrialRecord(**{k: _PARSERS[k](row[k]) for k in CSV_FIELDS}) for row in reader]


def records_to_json(records: list[TrialRecord]) -> str:
    return json.dumps([asdict(r) for r in records], indent=1)


def records_from_json(text: str) -> list[TrialRecord]:
    names = {f.name for f in fields(TrialRecord)}
    return [TrialRecord(**{k: v for k, v in row.items() if k in names}) for row in json.loads(text)]
