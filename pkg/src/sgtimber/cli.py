"""Command line entry point: ``sgtimber {one-knot,two-knot,rule-checks}``."""
from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor

from .checks import run_rule_checks
from .exceptions import SgTimberError
from .experiments import load_config, make_config, run_experiment

log = logging.getLogger("sgtimber")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sgtimber", description="Sparse-grid uncertainty studies of timber beams.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("one-knot", "two-knot"):
        p = sub.add_parser(name, help=f"run the {name} study")
        p.add_argument("--config", help="JSON file with overrides of the default settings")
        p.add_argument("--out", help="output directory (default: results/<study>)")
        p.add_argument("--threads", type=int, default=1, help="concurrent model evaluations")
        p.add_argument("--seed", type=int, help="base seed for validation and pdf samples")
        p.add_argument("--desk", action="store_true", help="start from the reduced desk-scale preset")
        p.add_argument("-v", "--verbose", action="store_true")
    p = sub.add_parser("rule-checks", help="run the built-in property checks")
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


def _rule_checks() -> int:
    failed = 0
    for r in run_rule_checks():
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail} ({r.seconds:.2f} s)")
        failed += not r.passed
    return 1 if failed else 0


def _study(args) -> int:
    if args.threads < 1:
        raise SgTimberError("--threads must be at least 1")
    config = load_config(args.config, args.command, args.desk) if args.config \
        else make_config(args.command, desk=args.desk)
    extra = {}
    if args.seed is not None:
        extra["seed"] = args.seed
    extra["out"] = args.out or (config.out if config.out != "results" else f"results/{args.command}")
    config = make_config(args.command, {**config.to_json(), **extra})
    if args.threads > 1:
        with ThreadPoolExecutor(args.threads) as pool:
            result = run_experiment(config, pool.map)
    else:
        result = run_experiment(config)
    print(f"wrote {result.out_dir} ({result.manifest['fom_solves']} model solves)")
    for method, metrics in result.manifest["slopes"].items():
        shown = ", ".join(f"{k} {v:.3f}" for k, v in metrics.items() if v is not None)
        if shown:
            print(f"  slope {method}: {shown}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "rule-checks":
            return _rule_checks()
        return _study(args)
    except SgTimberError as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
