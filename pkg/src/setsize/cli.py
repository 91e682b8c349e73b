"""Command-line interface.

Subcommands::

    setsize run --config FILE [--out DIR] [--seed S] [--threads K]
    setsize list
    setsize oracle NAME ARGS...

Exit codes: 0 success, 1 configuration/validation error, 2 runtime error.
"""

import argparse
import dataclasses
import sys

from .config import (MODEL_CLASSES, REGIME_SUPPORT, ValidationError,
                     parse_config)
from .engine import FAMILY_COLUMNS, run_schedule
from .oracles import (exact_ht_moments, exact_tank_moments,
                      exact_two_sample_moments)
from .output import write_outputs


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="setsize",
        description="Hidden-set size estimation experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one configured experiment")
    p_run.add_argument("--config", required=True, help="YAML config path")
    p_run.add_argument("--out", default="out", help="output directory")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
    p_run.add_argument("--threads", type=int, default=None,
                       help="override the config thread count (0 = auto)")

    sub.add_parser("list", help="print families, regimes and estimators")

    p_or = sub.add_parser("oracle", help="exact small-instance computations")
    p_or.add_argument("name",
                      choices=["exact-tank", "exact-two-sample", "exact-ht"])
    p_or.add_argument("params", nargs="*",
                      help="exact-tank N n ESTIMATOR | "
                           "exact-two-sample N n1 n2 ESTIMATOR | "
                           "exact-ht n SIZE [SIZE ...]")
    return parser


def _cmd_run(args):
    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    try:
        cfg = parse_config(text)
    except ValidationError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return 1
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.threads is not None:
        cfg = dataclasses.replace(cfg, threads=args.threads)
    exact = {"auto": "auto", "on": True, "off": False}[cfg.exact]
    schedule = cfg.build_schedule()
    results = run_schedule(schedule, cfg.estimators, cfg.replications,
                           cfg.seed, eps_list=cfg.eps, threads=cfg.threads,
                           exact=exact)
    written = write_outputs(cfg, schedule, results, args.out)
    print(f"wrote {len(written)} file(s) under {args.out}")
    return 0


def _cmd_list(_args):
    print("regimes: " + ", ".join(REGIME_SUPPORT))
    print()
    print(f"{'family':<14} {'regimes':<34} estimators")
    for family in MODEL_CLASSES:
        regimes = [r for r, fams in REGIME_SUPPORT.items() if family in fams]
        print(f"{family:<14} {','.join(regimes):<34} "
              + ", ".join(FAMILY_COLUMNS[family]))
    return 0


def _print_moments(m):
    print(f"E={float(m.expectation):.10g} "
          f"Var={float(m.variance):.10g} "
          f"support={m.support_size} "
          f"condition_prob={float(m.condition_prob):.10g}")


def _cmd_oracle(args):
    p = args.params
    try:
        if args.name == "exact-tank":
            if len(p) != 3:
                raise ValueError("usage: oracle exact-tank N n ESTIMATOR")
            m = exact_tank_moments(int(p[0]), int(p[1]), p[2])
        elif args.name == "exact-two-sample":
            if len(p) != 4:
                raise ValueError(
                    "usage: oracle exact-two-sample N n1 n2 ESTIMATOR")
            m = exact_two_sample_moments(int(p[0]), int(p[1]), int(p[2]),
                                         p[3])
            print(f"bias={float(m.expectation) - int(p[0]):.10g}")
        else:
            if len(p) < 2:
                raise ValueError("usage: oracle exact-ht n SIZE [SIZE ...]")
            m = exact_ht_moments([int(x) for x in p[1:]], int(p[0]))
        _print_moments(m)
        return 0
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "list":
            return _cmd_list(args)
        return _cmd_oracle(args)
    except Exception as exc:  # pragma: no cover - last-resort diagnostics
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
