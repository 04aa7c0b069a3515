"""Command-line driver for the experiment suite.

    gamekin run <config.json> [--seed S] [--out DIR] [--override key=value ...]
    gamekin validate <config.json>
    gamekin list-experiments

Exit codes: 0 when every built-in check of the experiment passed, 1 when
the run completed but a check failed, 2 on config or runtime errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import EXPERIMENTS, load_config
from .experiments import run_experiment


def _parse_overrides(pairs):
    overrides = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep:
            raise ValueError(f"override {pair!r} is not of the form key=value")
        try:
            overrides[key] = json.loads(value)
        except json.JSONDecodeError:
            overrides[key] = value
    return overrides


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gamekin",
                                     description="evolutionary game dynamics experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment from a config file")
    run_p.add_argument("config")
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument("--out", default=None)
    run_p.add_argument("--override", action="append", default=[],
                       metavar="KEY=VALUE", help="dotted-path config override")

    val_p = sub.add_parser("validate", help="validate a config file")
    val_p.add_argument("config")

    sub.add_parser("list-experiments", help="list available experiments")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "list-experiments":
        for name in EXPERIMENTS:
            print(name)
        return 0

    try:
        overrides = {}
        if args.command == "run":
            overrides = _parse_overrides(args.override)
            if args.seed is not None:
                overrides["seed"] = args.seed
            if args.out is not None:
                overrides["out"] = args.out
        cfg = load_config(args.config, overrides)
    except Exception as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if args.command == "validate":
        print(f"ok: {cfg.experiment} (hash {cfg.hash})")
        return 0

    try:
        artifacts = run_experiment(cfg)
    except Exception as exc:
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2

    for name, check in artifacts.summary["checks"].items():
        state = "pass" if check["passed"] else "FAIL"
        print(f"{state}  {name}: value={check['value']:.6g} "
              f"{check['op']} {check['threshold']:.6g}")
    print(f"summary: {artifacts.out_dir / 'summary.json'}")
    return 0 if artifacts.passed else 1


if __name__ == "__main__":
    sys.exit(main())
