"""``bbo-bench``: run the synthetic suite and report normalized scores."""

from __future__ import annotations

import argparse
import csv
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from ..controller import load_config, preset, PRESETS, SpboptConfig
from .objectives import get_objective, synthetic_suite
from .runner import ProtocolViolation, RunRecord, method_factory, run_experiment
from .scoring import aggregate


def _config_for(method: str, config_path: str | None) -> SpboptConfig | None:
    if config_path is None:
        return None
    base = preset(method) if method in PRESETS else None
    return load_config(config_path, base)


def _run_one(task) -> RunRecord:
    objective_name, method, config_path, K, B, seed = task
    factory = method_factory(method, _config_for(method, config_path))
    return run_experiment(get_objective(objective_name), factory, K, B, seed, method_name=method)


def _record_path(out: Path, r: RunRecord) -> Path:
    return out / "runs" / f"{r.method}__{r.objective}__seed{r.seed}.json"


def write_records(records: list[RunRecord], out: Path) -> None:
    (out / "runs").mkdir(parents=True, exist_ok=True)
    records = sorted(records, key=lambda r: (r.method, r.objective, r.seed))
    for r in records:
        _record_path(out, r).write_text(r.to_json() + "\n")
    with open(out / "summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["method", "objective", "seed", "score"])
        for r in records:
            writer.writerow([r.method, r.objective, r.seed, repr(r.score)])


def read_records(directory: Path) -> list[RunRecord]:
    return [RunRecord.from_json(p.read_text()) for p in sorted((directory / "runs").glob("*.json"))]


def cmd_run(args) -> int:
    if args.suite != "synthetic":
        print(f"unknown suite {args.suite!r}", file=sys.stderr)
        return 2
    objectives = [o.name for o in synthetic_suite(noise=args.noise)]
    methods = [args.method] + [m for m in (args.methods_compare or "").split(",") if m]
    # only the primary method takes --config; baselines keep their defaults
    tasks = [
        (obj, m, args.config if m == args.method else None, args.iters, args.batch, seed)
        for m in methods
        for obj in objectives
        for seed in range(args.seeds)
    ]
    try:
        if args.jobs > 1:
            with ProcessPoolExecutor(args.jobs) as pool:
                records = list(pool.map(_run_one, tasks))
        else:
            records = [_run_one(t) for t in tasks]
    except ProtocolViolation as exc:
        print(f"protocol violation: {exc}", file=sys.stderr)
        return 3
    out = Path(args.out)
    write_records(records, out)
    comparisons = [(args.method, m) for m in methods[1:]]
    print(aggregate(records, comparisons).table())
    return 0


def cmd_report(args) -> int:
    records = read_records(Path(args.input))
    if not records:
        print(f"no run records under {args.input}", file=sys.stderr)
        return 2
    print(aggregate(records).table())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bbo-bench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run experiments and write records")
    run.add_argument("--suite", default="synthetic")
    run.add_argument("--method", default="spbopt2")
    run.add_argument("--methods-compare", default="random,turbo_lite")
    run.add_argument("--iters", type=int, default=16)
    run.add_argument("--batch", type=int, default=8)
    run.add_argument("--seeds", type=int, default=8)
    run.add_argument("--config", default=None, help="JSON config for the primary method")
    run.add_argument("--out", required=True)
    run.add_argument("--noise", action="store_true", help="add 1%% Gaussian observation noise")
    run.add_argument("--jobs", type=int, default=1)
    run.set_defaults(func=cmd_run)

    report = sub.add_parser("report", help="summarize records written by run")
    report.add_argument("--in", dest="input", required=True)
    report.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
