"""Command-line entry point.

Exit codes: 0 all bounds hold / suite passed, 2 a bound (or property) failed
beyond tolerance, 3 an input violates 0 <= g <= A, 4 parse or configuration
error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

from . import steffensen
from .cases import FAMILIES, MIXED
from .expr import ExprError
from .numerics import FunctionSpec, HypothesisViolation, Interval
from .report import FORMATS, emit_report
from .steffensen import ReportConfig
from .suite import RunConfig, run_suite

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_HYPOTHESIS = 3
EXIT_USAGE = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _pair_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("--f", required=True, help="expression for f(t)")
    p.add_argument("--g", required=True, help="expression for g(t), 0 <= g <= A")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--A", type=float, default=1.0, dest="A", help="Hayashi scale (default 1)")
    p.add_argument("--f-prime", default=None, help="declared derivative of f (optional)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stefbound", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    check = sub.add_parser("check", help="full bound report for one (f, g) pair")
    _pair_arguments(check)
    check.add_argument("--p", type=float, default=2.0, help="exponent of the L_p branch")
    check.add_argument("--tol", type=float, default=steffensen.DEFAULT_TOL)
    check.add_argument("--n0", type=int, default=steffensen.DEFAULT_N0)
    check.add_argument("--n-max", type=int, default=steffensen.DEFAULT_N_MAX)
    check.add_argument("--format", choices=FORMATS, default="json")
    check.add_argument("--output", default=None, help="write to this file instead of stdout")

    ident = sub.add_parser("identity", help="residuals of both representations at n panels")
    _pair_arguments(ident)
    ident.add_argument("--n", type=int, required=True)

    fuzz = sub.add_parser("fuzz", help="run the seeded property suite")
    fuzz.add_argument("--cases", type=int, default=1000)
    fuzz.add_argument("--seed", type=int, default=0)
    fuzz.add_argument("--family", choices=FAMILIES + (MIXED,), default=MIXED)
    fuzz.add_argument("--tol", type=float, default=steffensen.DEFAULT_TOL)

    sweep = sub.add_parser("sweep", help="residual-vs-n convergence table")
    _pair_arguments(sweep)
    sweep.add_argument("--n-list", default="64,128,256,512,1024,2048,4096")
    sweep.add_argument("--format", choices=FORMATS, default="csv")
    return parser


def _pair(args) -> tuple[FunctionSpec, FunctionSpec]:
    iv = Interval(args.a, args.b)
    f = FunctionSpec.from_expr(args.f, iv, args.f_prime)
    g = FunctionSpec.from_expr(args.g, iv)
    return f, g


def _write(text: str, path: str | None = None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_check(args) -> int:
    f, g = _pair(args)
    cfg = ReportConfig(tol=args.tol, n0=args.n0, n_max=args.n_max, p=args.p, A=args.A)
    report = steffensen.full_report(f, g, cfg)
    _write(emit_report(report, args.format), args.output)
    return EXIT_VIOLATION if report.violations() else EXIT_OK


def cmd_identity(args) -> int:
    f, g = _pair(args)
    left, right = steffensen.hayashi_residuals(f, g, args.A, args.n)
    _write(json.dumps({"n": args.n, "A": args.A, "left": left, "right": right}, indent=2))
    return EXIT_OK


def cmd_fuzz(args) -> int:
    config = RunConfig(cases=args.cases, seed=args.seed, family=args.family, tol=args.tol)
    start = time.perf_counter()
    summary = run_suite(config)
    elapsed = time.perf_counter() - start
    _write(json.dumps(summary.to_dict(), indent=2))
    print(f"{config.cases} cases in {elapsed:.1f} s", file=sys.stderr)
    return EXIT_OK if summary.passed else EXIT_VIOLATION


def cmd_sweep(args) -> int:
    f, g = _pair(args)
    try:
        ns = [int(tok) for tok in args.n_list.split(",") if tok.strip()]
    except ValueError:
        raise ValueError(f"--n-list must be comma-separated integers, got {args.n_list!r}")
    rows = []
    for n in ns:
        left, right = steffensen.hayashi_residuals(f, g, args.A, n)
        rows.append({"n": n, "left": left, "right": right})
    if args.format == "json":
        _write(json.dumps(rows, indent=2))
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "left", "right"])
        writer.writerows([r["n"], repr(r["left"]), repr(r["right"])] for r in rows)
        _write(buf.getvalue())
    return EXIT_OK


COMMANDS = {"check": cmd_check, "identity": cmd_identity, "fuzz": cmd_fuzz, "sweep": cmd_sweep}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except HypothesisViolation as exc:
        print(f"hypothesis violation: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (ExprError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
