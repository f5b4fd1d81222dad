"""Command-line front end: ``hdmean test | simulate | diagnose``.

Exit status is 0 on success whatever the test decides, 1 when an experiment
finished with failed cells, and 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .diagnostics import DEFAULT_EPSILON_GRID, full_report
from .errors import HdmeanError
from .harness import PlanError, load_plan, run_plan
from .csvio import CsvError, read_matrix, read_vector
from .rng import MAX_SEED
from .statistic import TestConfig, run_test

EXIT_OK, EXIT_PARTIAL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be in [0, 2**64)")
    return v


def _alpha(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError("alpha must lie in (0, 1)")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _eps_grid(text: str) -> list:
    try:
        grid = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    if not grid or any(not (e > 0 and e != float("inf")) for e in grid):
        raise argparse.ArgumentTypeError("epsilon grid needs positive finite values")
    return grid


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hdmean", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="bootstrap test of H0: mean = mu0 on a CSV sample")
    t.add_argument("--input", required=True, help="CSV file, one observation per row")
    t.add_argument("--alpha", type=_alpha, default=0.05)
    t.add_argument("--b", type=_positive_int, default=2000, help="bootstrap replicates")
    t.add_argument("--seed", type=_seed, required=True)
    t.add_argument("--mu0", help="hypothesised mean: inline '1,2,...' or a one-row CSV file")
    t.add_argument("--workers", type=_positive_int, default=1)
    t.add_argument("--out", help="write the JSON report here as well as to stdout")

    s = sub.add_parser("simulate", help="run an experiment plan")
    s.add_argument("--plan", required=True, help="TOML (or .json) plan file")
    s.add_argument("--out", required=True, help="JSON report path")
    s.add_argument("--csv", help="also write the cells as CSV")
    s.add_argument("--workers", type=_positive_int, default=1)

    g = sub.add_parser("diagnose", help="Lindeberg, trace and covariance diagnostics of a CSV sample")
    g.add_argument("--input", required=True)
    g.add_argument("--eps", type=_eps_grid, default=list(DEFAULT_EPSILON_GRID), help="comma-separated epsilon grid")
    g.add_argument("--l", type=_positive_int, default=None, help="projection level (default: d)")
    g.add_argument("--out")
    return parser


def _emit(doc: dict, out) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    sys.stdout.write(text)
    if out:
        Path(out).write_text(text)


def cmd_test(args) -> int:
    x = read_matrix(args.input)
    n, d = x.shape
    mu0 = None
    if args.mu0 is not None:
        mu0 = read_vector(args.mu0)
        if mu0.size != d:
            raise UsageError(f"--mu0 has {mu0.size} entries but {args.input} has {d} columns")
    config = TestConfig(alpha=args.alpha, b_replicates=args.b, seed=args.seed, mu0=mu0)
    result = run_test(x, config, workers=args.workers)
    doc = {"n": n, "d": d, **result.to_dict(), "mu0": list(config.mu0) if mu0 is not None else [0.0] * d}
    _emit(doc, args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    plan = load_plan(args.plan)

    def progress(cell):
        alpha = "" if cell["alpha"] is None else f" alpha={cell['alpha']}"
        if cell["status"] == "ok":
            body = f"{cell['metric']}={cell['value']:.6g} (se {cell['stderr']:.3g}) [{cell['wall_time']:.1f}s]"
        else:
            body = f"FAILED {cell['error']}"
        print(f"cell {cell['index']}: n={cell['n']} d_n={cell['d_n']}{alpha} {body}", file=sys.stderr)

    report = run_plan(plan, workers=args.workers, progress=progress)
    Path(args.out).write_text(report.to_json())
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    return EXIT_PARTIAL if report.failed else EXIT_OK


def cmd_diagnose(args) -> int:
    x = read_matrix(args.input)
    d = x.shape[1]
    if args.l is not None and args.l > d:
        raise UsageError(f"--l {args.l} exceeds the number of columns d = {d}")
    report = full_report(x, args.eps, l_projection=args.l)
    doc = report.to_dict()
    doc["epsilon_grid"] = [float(e) for e in args.eps]
    _emit(doc, args.out)
    return EXIT_OK


COMMANDS = {"test": cmd_test, "simulate": cmd_simulate, "diagnose": cmd_diagnose}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, CsvError, PlanError, HdmeanError, OSError) as exc:
        print(f"hdmean {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
