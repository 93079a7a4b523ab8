"""Command line entry point: ``bench``, ``table1`` and ``verify``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from pricedsort.bench.harness import ExperimentConfig, records_to_csv, records_to_json, run_experiment
from pricedsort.bench.report import format_summary, format_table1, summarize, table1_report
from pricedsort.certificates import (
    Certificate,
    Maximal,
    MaximalSet,
    MaxTree,
    Rank,
    Sort,
    agrees_with,
    verify_maximal,
    verify_maximal_set,
    verify_rank,
    verify_sort,
)
from pricedsort.errors import ConfigError, InvalidCertificateError, ParameterError
from pricedsort.instance import Instance


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pricedsort", description="Priced-comparison experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bench", help="run a grid of seeded trials and check closed forms")
    b.add_argument("--model", required=True, choices=["uniform", "boolean", "unit-inf"])
    b.add_argument("--alg", required=True)
    b.add_argument("--n", type=_ints, required=True, help="comma-separated sizes")
    b.add_argument("--p", type=_floats, default=(0.5,), help="comma-separated probabilities")
    b.add_argument("--k", default="n/2", help='rank: integer, "n" or "n/d"')
    b.add_argument("--trials", type=int, default=100)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--format", choices=["csv", "json"], default="csv")
    b.add_argument("--out", help="record file (default: stdout)")
    b.add_argument("--alpha-coeff", type=float, default=ExperimentConfig.alpha_coeff)
    b.add_argument("--w-mode", choices=["quadratic", "lemma"], default="quadratic")
    b.add_argument("--dump-instances", nargs="?", const="instances", default=None, metavar="DIR",
                   help="write each trial's instance and certificate as JSON")

    t = sub.add_parser("table1", help="summary table at p = 1/2, n in {64, 128, 256}")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out", help="JSON report path")
    t.add_argument("--trials", type=int, default=200)
    t.add_argument("--workers", type=int, default=1)

    v = sub.add_parser("verify", help="check a certificate against an instance")
    v.add_argument("--certificate", required=True)
    v.add_argument("--instance", required=True)
    return parser


def _bench(args) -> int:
    config = ExperimentConfig(
        model=args.model, algorithm=args.alg, n_values=args.n, p_values=args.p,
        k_spec=args.k, trials=args.trials, root_seed=args.seed, workers=args.workers,
        out=args.out, format=args.format, alpha_coeff=args.alpha_coeff,
        w_mode=args.w_mode, dump_instances=args.dump_instances,
    )
    records = run_experiment(config)
    text = records_to_csv(records) if args.format == "csv" else records_to_json(records)
    rows = summarize(records)
    if args.out:
        Path(args.out).write_text(text)
        print(format_summary(rows))
    else:
        sys.stdout.write(text)
        print(format_summary(rows), file=sys.stderr)
    return 0 if all(r.passed for r in rows) else 1


def _table1(args) -> int:
    report = table1_report(args.seed, trials=args.trials, workers=args.workers)
    if args.out:
        Path(args.out).write_text(json.dumps(report, indent=1))
    print(format_table1(report))
    return 0 if report["passed"] else 1


def check_certificate(cert: Certificate, inst: Instance) -> bool:
    """Validate a certificate of any kind against the instance it claims to describe."""
    kind = cert.kind
    n = inst.n
    if isinstance(kind, Sort):
        ok = kind.order is not None and verify_sort(cert, kind.order)
    elif isinstance(kind, Rank):
        ok = verify_rank(cert, kind.element, kind.k, n)
    elif isinstance(kind, MaxTree):
        ok = verify_rank(cert, kind.element, n, n)
    elif isinstance(kind, Maximal):
        ok = verify_maximal(cert, kind.element, inst)
    elif isinstance(kind, MaximalSet):
        ok = verify_maximal_set(cert, kind.members, inst)
    else:
        raise InvalidCertificateError("certificate does not say what it proves")
    return bool(ok) and agrees_with(cert, inst)


def _verify(args) -> int:
    inst = Instance.from_json(json.loads(Path(args.instance).read_text()))
    cert = Certificate.from_json(json.loads(Path(args.certificate).read_text()))
    try:
        ok = check_certificate(cert, inst)
    except (InvalidCertificateError, ParameterError) as exc:
        print(f"invalid: {exc}")
        return 1
    print("valid" if ok else "invalid")
    return 0 if ok else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"bench": _bench, "table1": _table1, "verify": _verify}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
