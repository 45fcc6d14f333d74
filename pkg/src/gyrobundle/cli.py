"""Command-line entry point.

    gyrobundle run <scenario-file> [--out dir] [--batch dir]
    gyrobundle verify [--seed N] [--trials N]
    gyrobundle compare-srj [--seed N] [--trials N]

Exit codes: 0 pass, 1 residual threshold violation, 2 input error,
3 numerical abort.
"""

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import verify as verify_mod
from .integrators import IntegrationAbort
from .scenario import (DiagnosticReport, ScenarioError, parse_scenario,
                       run_scenario, write_report)

EXIT_PASS = 0
EXIT_THRESHOLD = 1
EXIT_INPUT = 2
EXIT_ABORT = 3


def _run_one(path, out_dir):
    name = os.path.splitext(os.path.basename(path))[0]
    try:
        scenario = parse_scenario(path)
    except (OSError, ScenarioError, ValueError) as exc:
        print(f"{name}: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        csv_path, report = run_scenario(scenario, out_dir)
    except IntegrationAbort as exc:
        print(f"{name}: numerical abort: {exc}", file=sys.stderr)
        return EXIT_ABORT
    write_report(os.path.join(out_dir, "report.txt"), report)
    status = "PASS" if report.passed else "FAIL"
    print(f"{name}: {status}")
    for line in report.lines():
        print(f"  {line}")
    if csv_path:
        print(f"  trajectory: {csv_path}")
    return EXIT_PASS if report.passed else EXIT_THRESHOLD


def _batch_worker(args):
    path, out_root = args
    name = os.path.splitext(os.path.basename(path))[0]
    return _run_one(path, os.path.join(out_root, name))


def cmd_run(args):
    if args.batch:
        paths = sorted(
            os.path.join(args.batch, f) for f in os.listdir(args.batch)
            if f.endswith((".cfg", ".scenario", ".txt")))
        if not paths:
            print(f"no scenario files in {args.batch}", file=sys.stderr)
            return EXIT_INPUT
        with ProcessPoolExecutor() as pool:
            codes = list(pool.map(_batch_worker, [(p, args.out) for p in paths]))
        return max(codes)
    return _run_one(args.scenario, args.out)


def _default_params(seed):
    return verify_mod.random_inertia(np.random.default_rng(seed))


def cmd_verify(args):
    p = _default_params(args.seed)
    checks = verify_mod.run_all(p, seed=args.seed, trials=args.trials)
    width = max(len(c.name) for c in checks)
    failed = False
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        failed = failed or not c.passed
        print(f"{c.name:<{width}}  {c.residual:12.3e}  (< {c.threshold:.0e})  {status}")
    return EXIT_THRESHOLD if failed else EXIT_PASS


def cmd_compare_srj(args):
    p = _default_params(args.seed)
    result = verify_mod.srj_comparison(p, seed=args.seed, trials=args.trials)
    for label, res in result["term_residuals"].items():
        print(f"term {label:<40} {res:12.3e}")
    print(f"srj_residual_max {result['srj_residual_max']:12.3e}")
    return EXIT_PASS if result["srj_residual_max"] < 1e-10 else EXIT_THRESHOLD


def build_parser():
    parser = argparse.ArgumentParser(prog="gyrobundle",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario file")
    p_run.add_argument("scenario", nargs="?", help="scenario config file")
    p_run.add_argument("--out", default=".", help="output directory")
    p_run.add_argument("--batch", help="run every scenario in a directory")
    p_run.set_defaults(func=cmd_run)

    p_verify = sub.add_parser("verify", help="run the property/oracle suite")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--trials", type=int, default=10000)
    p_verify.set_defaults(func=cmd_verify)

    p_cmp = sub.add_parser("compare-srj", help="per-term SRJ expansion residuals")
    p_cmp.add_argument("--seed", type=int, default=0)
    p_cmp.add_argument("--trials", type=int, default=10000)
    p_cmp.set_defaults(func=cmd_compare_srj)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "run" and not args.batch and not args.scenario:
        parser.error("run requires a scenario file or --batch")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
