"""Command-line entry point.

    anevo run <config> [--seed S] [--out DIR] [--workers N] [--trajectories]
    anevo compare <config-a> <config-b> [--seeds S1,S2,...] [--out DIR]
    anevo validate <config>

Exit codes: 0 success, 1 configuration error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .campaign import compare_algorithms, emit_summary, run_campaign
from .config import ConfigError, dump_config, load_config, with_overrides

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2

log = logging.getLogger("anevo")


def _seed(s: str) -> int:
    return int(s, 0)


def _seed_list(s: str) -> list[int]:
    return [int(x, 0) for x in s.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="anevo", description="Neuroevolution experiments.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a seeded campaign")
    run.add_argument("config", type=Path)
    run.add_argument("--seed", type=_seed, help="override master_seed")
    run.add_argument("--out", type=Path, help="override output_dir")
    run.add_argument("--workers", type=int, default=1, help="parallel fitness evaluations")
    run.add_argument("--trajectories", action="store_true", help="dump each generation winner's trajectory")

    cmp = sub.add_parser("compare", help="compare two algorithms on shared seeds")
    cmp.add_argument("config_a", type=Path)
    cmp.add_argument("config_b", type=Path)
    cmp.add_argument("--seeds", type=_seed_list, help="comma-separated master seeds")
    cmp.add_argument("--out", type=Path, help="where to write comparison.csv")
    cmp.add_argument("--workers", type=int, default=1)

    val = sub.add_parser("validate", help="check a config and print it with defaults resolved")
    val.add_argument("config", type=Path)
    return parser


def _run(args) -> int:
    cfg = with_overrides(load_config(args.config), master_seed=args.seed, output_dir=args.out)
    summary = run_campaign(cfg, workers=args.workers, trajectories=args.trajectories)
    sys.stdout.write(emit_summary(summary, "table"))
    if summary.failed:
        log.error("%d replication(s) failed", len(summary.failed))
        return EXIT_RUNTIME
    return EXIT_OK


def _compare(args) -> int:
    a = with_overrides(load_config(args.config_a), output_dir=args.out)
    b = load_config(args.config_b)
    try:
        result = compare_algorithms(a, b, args.seeds, workers=args.workers)
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    sys.stdout.write(result.to_csv())
    return EXIT_OK


def _validate(args) -> int:
    sys.stdout.write(dump_config(load_config(args.config)))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": _run, "compare": _compare, "validate": _validate}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except Exception as exc:
        log.error("runtime failure: %s", exc)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
