"""Command line entry points: `adaptswarm run` and `adaptswarm report`."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..agents import ALGORITHMS
from ..cluster.config import ConfigError
from .aggregate import SchemaError, aggregate, scan_output_dir
from .config import OUT_DIR_ENV, build_config, load_config_file
from .plots import emit_plots
from .report import compare_report
from .runner import run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _parse_seeds(raw: str) -> list[int]:
    try:
        return [int(s) for s in raw.split(",") if s != ""]
    except ValueError as exc:
        raise ConfigError(f"bad seed list {raw!r}") from exc


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adaptswarm",
        description="Run seeded adaptation experiments and report on them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one algorithm over one or more seeds")
    run.add_argument("--algo", required=True, choices=ALGORITHMS,
                     help="planner tag")
    run.add_argument("--episodes", type=int, default=None)
    run.add_argument("--seed", default=None,
                     help="seed or comma-separated seed list, e.g. 42 or 1,2,3")
    run.add_argument("--config", default=None, help="JSON config file")
    run.add_argument("--out", default=None,
                     help=f"output directory (default ${OUT_DIR_ENV} or ./out)")

    rep = sub.add_parser("report", help="aggregate CSVs, emit plots and a ranking")
    rep.add_argument("--in", dest="in_dir", required=True,
                     help="directory holding per-algorithm experiment outputs")
    return parser


def parse_cli(argv: list[str]):
    """Resolve flags over config-file defaults into an ExperimentConfig."""
    args = make_parser().parse_args(argv)
    if args.command == "report":
        return args
    file_data = load_config_file(args.config) if args.config else None
    seeds = _parse_seeds(args.seed) if args.seed is not None else None
    return build_config(
        algorithm=args.algo,
        episodes=args.episodes,
        seeds=seeds,
        out_dir=args.out,
        file_data=file_data,
    )


def _cmd_report(in_dir: str) -> int:
    root = Path(in_dir)
    csvs = scan_output_dir(root)
    if not csvs:
        print(f"no experiment manifests found under {root}", file=sys.stderr)
        return EXIT_CONFIG
    summaries = aggregate(csvs)
    written, warnings = emit_plots(summaries, root)
    summary_doc = {
        algo: {
            "seeds": s.seeds,
            "episodes": s.episodes,
            "final_means": s.final_means,
            "episodes_to_best": s.episodes_to_best,
            "reward_trend": s.reward_trend,
            "convergence_rate": s.convergence_rate,
        }
        for algo, s in summaries.items()
    }
    (root / "summary.json").write_text(
        json.dumps(summary_doc, indent=2, sort_keys=True) + "\n")
    if len(summaries) >= 2:
        text = compare_report(summaries)
        (root / "report.txt").write_text(text)
        print(text, end="")
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"wrote {len(written)} plots and summary.json under {root}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        parsed = parse_cli(argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if isinstance(parsed, argparse.Namespace):
        try:
            return _cmd_report(parsed.in_dir)
        except SchemaError as exc:
            print(f"schema error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except OSError as exc:
            print(f"report failed: {exc}", file=sys.stderr)
            return EXIT_RUNTIME
    try:
        exp_dir = run_experiment(parsed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # runtime failures finalise the manifest as failed
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"completed {parsed.algorithm}: results under {exp_dir}")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
