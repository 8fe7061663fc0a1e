"""Command-line entry point: ``dupfair tradeoff`` and ``dupfair duplication``."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import DomainError
from .experiments import RUNNERS, config_metadata, emit_csv, parse_config, render_csv


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dupfair",
        description="Simulate fair ranking policies over repeated impressions of one query.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--delta", type=float, nargs="+", help="relevance spacing(s)")
    shared.add_argument("--impressions", type=int, nargs="+", help="number(s) of impressions J")
    shared.add_argument("--lambda", dest="lam", type=float, nargs="+", help="greedy fairness weight(s)")
    shared.add_argument("--cost", type=float, nargs="+", help="duplication cost(s) k")
    shared.add_argument("--pl-reps", type=int, help="Plackett-Luce repetitions")
    shared.add_argument("--seed", type=int, help="base seed")
    shared.add_argument("--c", type=float, help="cascade click scale")
    shared.add_argument("--gamma", type=float, help="cascade persistence")
    shared.add_argument("--out", help="output CSV path (default: stdout)")
    shared.add_argument("--config", help="JSON config file; flags override its values")
    shared.add_argument("-v", "--verbose", action="store_true")
    sub.add_parser("tradeoff", parents=[shared], help="greedy lambda sweep against Plackett-Luce")
    sub.add_parser("duplication", parents=[shared], help="extra attention gained by duplicates")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    overrides = {
        "delta": args.delta,
        "impressions": args.impressions,
        "lambda": args.lam,
        "cost": args.cost,
        "pl-reps": args.pl_reps,
        "seed": args.seed,
        "c": args.c,
        "gamma": args.gamma,
        "out": args.out,
    }
    try:
        config = parse_config(args.experiment, args.config, overrides)
        rows = RUNNERS[args.experiment](config)
        if config.out:
            emit_csv(rows, config.out, args.experiment)
            with open(f"{config.out}.meta.json", "w") as fh:
                json.dump(config_metadata(config, args.experiment), fh, indent=2, sort_keys=True)
                fh.write("\n")
            print(f"wrote {len(rows)} rows to {config.out}", file=sys.stderr)
        else:
            sys.stdout.write(render_csv(rows, args.experiment))
    except (DomainError, OSError) as exc:
        print(f"dupfair: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
