"""Command-line front end.

::

    sharpconst profile  --n 3 --k 2 --p inf --grid 1001 --format csv
    sharpconst lambda   --n 3 --k 2 --p inf
    sharpconst envelope --n 3
    sharpconst kernel   --n 2 --k 1 --a 1/3 --nu 0,1/2
    sharpconst verify   [criterion ids ...] --seed 0

Exit codes: 0 ok, 1 usage error, 2 solver non-convergence, 3 verification
failure.  Documents go to stdout (or ``--out``); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction
from math import inf

from . import __version__
from .constants import (
    DEFAULT_GRID,
    A_profile,
    ProfileRow,
    envelope_B,
    format_p,
    lambda_constant,
    local_max_points,
)
from .errors import DomainError, NonConvergenceError
from .kernels import ProblemSpec, kernel_dump

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NONCONVERGENCE = 2
EXIT_VERIFY = 3

SCHEMA = 1
CSV_HEADER = ("a", "A", "B")
P_RESOLUTION = 10 ** 12


class UsageError(Exception):
    """Bad command line; the message names the offending flag."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- parsing ---------------------------------------------------------------------

def parse_p(token: str):
    """``"inf"`` -> inf, integers stay int, decimals become exact fractions.

    Decimals are kept to 1e-12 resolution.

    >>> parse_p("inf"), parse_p("2"), parse_p("1.5")
    (inf, 2, Fraction(3, 2))
    """
    t = token.strip().lower()
    if t in ("inf", "infinity"):
        return inf
    try:
        v = Fraction(t)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--p: cannot parse {token!r} (use 1, 2, inf or a decimal > 1)") from None
    v = Fraction(round(v * P_RESOLUTION), P_RESOLUTION)
    if v < 1:
        raise UsageError(f"--p: {token} is below 1")
    return int(v) if v.denominator == 1 else v


def parse_a(token: str) -> Fraction:
    try:
        a = Fraction(token.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--a: cannot parse {token!r}") from None
    if not 0 < a < 1:
        raise UsageError(f"--a: {token} is not inside (0, 1)")
    return a


def parse_nu(token: str) -> list:
    try:
        return [Fraction(v.strip()) for v in token.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--nu: cannot parse {token!r} (comma-separated numbers)") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--n", type=int, help="order of the highest derivative")
    common.add_argument("--k", type=int, help="order of the evaluated derivative, 0 <= k < n")
    common.add_argument("--p", type=str, help="1, 2, inf or a decimal > 1")
    common.add_argument("--a", type=str, help="evaluation point in (0, 1)")
    common.add_argument("--grid", type=int, default=None, help=f"profile points (default {DEFAULT_GRID})")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--out", type=str, default=None, help="output path (default stdout)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomised checks")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for profiles")

    parser = _Parser(prog="sharpconst", description="Sharp constants A_{n,k,p}(a) and Lambda_{n,k,p}.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    sub.add_parser("profile", parents=[common], help="A(a) over a grid (or at --a)")
    sub.add_parser("lambda", parents=[common], help="sup over a of A(a)")
    sub.add_parser("envelope", parents=[common], help="touch points a_j and B_n(a_j)")
    kp = sub.add_parser("kernel", parents=[common], help="JSON dump of g, g^(n), S and Q")
    kp.add_argument("--nu", type=str, default=None, help="comma-separated nu_0..nu_{n-1} for Q")
    vp = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    vp.add_argument("ids", nargs="*", type=int, help="check ids to run (default all)")
    return parser


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name} is required for '{args.command}'")


def _check_nk(args):
    if args.n < 1:
        raise UsageError(f"--n: {args.n} must be >= 1")
    if args.k is not None and not 0 <= args.k <= args.n - 1:
        raise UsageError(f"--k: {args.k} must satisfy 0 <= k <= n-1 = {args.n - 1}")


def _check_env():
    env = os.environ.get("SHARPCONST_MAX_ITERS")
    if env is not None:
        try:
            ok = int(env) > 0
        except ValueError:
            ok = False
        if not ok:
            raise UsageError(f"SHARPCONST_MAX_ITERS: {env!r} is not a positive integer")


# -- output ----------------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    v = float(v)
    if math.isnan(v):
        return "nan"
    return f"{v:.9g}"


def format_csv(rows) -> str:
    """``a,A,B`` with a header; 9 significant digits, '\\n' line ends.

    ``rows`` holds (a, A, B) triples; None becomes an empty field.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for a, A, B in rows:
        w.writerow([_fmt(a), _fmt(A), _fmt(B)])
    return buf.getvalue()


def parse_csv(text: str) -> list:
    """Inverse of :func:`format_csv`."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header}")
    return [tuple(float(v) if v != "" else None for v in row) for row in reader if row]


def _json_num(v):
    if v is None:
        return None
    v = float(v)
    return None if math.isnan(v) else v


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _json(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _diag(msg: str):
    print(f"sharpconst: {msg}", file=sys.stderr)


# -- subcommands -----------------------------------------------------------------

def cmd_profile(args) -> int:
    _require(args, "n", "k", "p")
    _check_nk(args)
    p = parse_p(args.p)
    grid = DEFAULT_GRID if args.grid is None else args.grid
    if grid < 3:
        raise UsageError(f"--grid: {grid} must be >= 3")
    points = [parse_a(args.a)] if args.a is not None else None
    rows = A_profile(args.n, args.k, p, grid, points=points, jobs=args.jobs)
    failed = [r for r in rows if r.error]
    for r in failed:
        _diag(f"a = {r.a:.9g}: {r.error}")
    if (args.format or "csv") == "csv":
        text = format_csv([(r.a, r.A, r.envelope) for r in rows])
    else:
        text = _json({
            "schema": SCHEMA, "n": args.n, "k": args.k, "p": format_p(p),
            "grid": None if points else grid,
            "rows": [{"a": r.a, "A": _json_num(r.A), "B": _json_num(r.envelope)} for r in rows],
        })
    _emit(text, args.out)
    return EXIT_NONCONVERGENCE if failed else EXIT_OK


def cmd_lambda(args) -> int:
    _require(args, "n", "k", "p")
    _check_nk(args)
    p = parse_p(args.p)
    grid = DEFAULT_GRID if args.grid is None else args.grid
    if grid < 3:
        raise UsageError(f"--grid: {grid} must be >= 3")
    res = lambda_constant(args.n, args.k, p, grid=grid, jobs=args.jobs)
    failed = [r for r in res.rows if r.error]
    if failed:
        _diag(f"{len(failed)} profile points did not converge")
    doc = {"schema": SCHEMA, **res.to_dict()}
    if (args.format or "json") == "json":
        text = _json({k: (_json_num(v) if isinstance(v, float) else v) for k, v in doc.items()})
    else:
        keys = ["n", "k", "p", "lambda", "argmax_a", "method"]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(keys)
        w.writerow([_fmt(doc[k]) if isinstance(doc[k], float) else doc[k] for k in keys])
        text = buf.getvalue()
    _emit(text, args.out)
    if res.flagged:
        _diag(f"closed form {res.closed_form} and optimisation {res.optimized} disagree")
        return EXIT_VERIFY
    return EXIT_NONCONVERGENCE if failed else EXIT_OK


def cmd_envelope(args) -> int:
    _require(args, "n")
    _check_nk(args)
    pts = local_max_points(args.n)
    if (args.format or "csv") == "csv":
        text = format_csv([(a, None, envelope_B(args.n, a)) for a in pts])
    else:
        text = _json({"schema": SCHEMA, "n": args.n,
                      "rows": [{"a": a, "B": envelope_B(args.n, a)} for a in pts]})
    _emit(text, args.out)
    return EXIT_OK


def cmd_kernel(args) -> int:
    _require(args, "n", "k", "a")
    _check_nk(args)
    a = parse_a(args.a)
    p = parse_p(args.p) if args.p is not None else 2
    nu = parse_nu(args.nu) if args.nu is not None else None
    if nu is not None and len(nu) != args.n:
        raise UsageError(f"--nu: need exactly n = {args.n} values, got {len(nu)}")
    if args.format == "csv":
        raise UsageError("--format: kernel dumps are JSON only")
    doc = kernel_dump(ProblemSpec(args.n, args.k, p, a), nu)
    _emit(_json(doc), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import CHECKS, run_checks

    unknown = [i for i in args.ids if i not in CHECKS]
    if unknown:
        raise UsageError(f"verify: unknown check ids {unknown} (known: {sorted(CHECKS)})")
    results = []
    for res in run_checks(args.ids, seed=args.seed):
        _diag(res.line())
        results.append(res)
    if (args.format or "csv") == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["criterion", "status", "name", "detail"])
        for r in results:
            w.writerow([r.id, "PASS" if r.passed else "FAIL", r.name, r.detail])
        text = buf.getvalue()
    else:
        text = _json({
            "schema": SCHEMA, "seed": args.seed,
            "passed": all(r.passed for r in results),
            "results": [{"criterion": r.id, "name": r.name, "passed": r.passed,
                         "detail": r.detail} for r in results],
        })
    _emit(text, args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


COMMANDS = {
    "profile": cmd_profile,
    "lambda": cmd_lambda,
    "envelope": cmd_envelope,
    "kernel": cmd_kernel,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _check_env()
        if args.jobs is not None and args.jobs < 1:
            raise UsageError(f"--jobs: {args.jobs} must be >= 1")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        _diag(f"usage error: {exc}")
        return EXIT_USAGE
    except DomainError as exc:
        _diag(f"usage error: {exc}")
        return EXIT_USAGE
    except NonConvergenceError as exc:
        _diag(f"no convergence: {exc}")
        return EXIT_NONCONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
