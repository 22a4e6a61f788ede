"""Command-line front end.

Usage:
    qgamma eval --fn psi --q 0.5 --x 1 --tol 1e-14
    qgamma constants --q 0.5 --s 0.5
    qgamma certify --family gqc --c 0 --N 10000
    qgamma verify --theorem all --format csv --out report.csv
    qgamma sweep --fn psi1 --q 0.3,0.5,0.9 --x 0.5,1,2 --format csv
    qgamma --show-defaults

Exit codes: 0 when everything passes, 1 when a verification fails (the
report is still written), 2 for usage, domain and I/O errors.
"""

from __future__ import annotations

import argparse
import itertools
import sys
from fractions import Fraction
from typing import Callable, Sequence

from .certificates import Family, FamilyId, certify_signs
from .core import ConvergenceError, DomainError, TruncationPolicy, lngamma_q, psi_q, psi_q_deriv
from .means import sharp_constants
from .report import dumps_json, fmt_float, render, write_text
from .theorems import DEFAULT_GRID, GridSpec, TheoremId, verify_theorem

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

FUNCTIONS: dict[str, Callable] = {
    "lngamma": lambda x, q, pol: lngamma_q(x, q, pol),
    "psi": lambda x, q, pol: psi_q(x, q, pol),
    "psi1": lambda x, q, pol: psi_q_deriv(x, q, 1, pol),
    "psi2": lambda x, q, pol: psi_q_deriv(x, q, 2, pol),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def float_list(text: str) -> tuple[float, ...]:
    """Parse ``"0.1,0.5,1/3"``; an empty string gives an empty tuple."""
    items = [t.strip() for t in text.split(",") if t.strip()]
    try:
        return tuple(float(Fraction(t)) for t in items)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--q", type=float_list, help="comma-separated q values")
    common.add_argument("--x", type=float_list, help="comma-separated x values")
    common.add_argument("--s", type=float_list, help="comma-separated s values in (0, 1)")
    common.add_argument("--c", type=float_list, help="comma-separated shift constants c >= 0")
    common.add_argument("--t", type=float_list, help="right endpoints t for the integral mean")
    common.add_argument("--tol", type=positive_float, default=1e-15, help="series truncation target")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json", dest="fmt")

    p = _Parser(prog="qgamma", description="q-gamma evaluation and inequality verification.")
    p.add_argument("--show-defaults", action="store_true", help="print the built-in grids and exit")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    e = sub.add_parser("eval", parents=[common], help="evaluate one function at one point")
    e.add_argument("--fn", choices=sorted(FUNCTIONS), default="psi")

    sub.add_parser("constants", parents=[common], help="sharp shift constants b, a(q,s), a_q")

    c = sub.add_parser("certify", parents=[common], help="coefficient sign certificate")
    c.add_argument("--family", choices=[f.value for f in FamilyId], required=True)
    c.add_argument("--N", type=int, default=DEFAULT_GRID.cert_N)

    v = sub.add_parser("verify", parents=[common], help="verify a theorem on a grid")
    v.add_argument("--theorem", choices=[t.value for t in TheoremId] + ["all"], default="all")
    v.add_argument("--N", type=int, default=DEFAULT_GRID.cert_N, help="certificate length")

    w = sub.add_parser("sweep", parents=[common], help="tabulate a function over q x x")
    w.add_argument("--fn", choices=sorted(FUNCTIONS), default="psi")
    return p


def _one(values, name):
    if values is None:
        raise UsageError(f"--{name} is required")
    if len(values) != 1:
        raise UsageError(f"--{name} takes a single value here")
    return values[0]


def _grid(args) -> GridSpec:
    d = DEFAULT_GRID
    return GridSpec(
        q_values=d.q_values if args.q is None else args.q,
        x_values=d.x_values if args.x is None else args.x,
        s_values=d.s_values if args.s is None else args.s,
        c_values=args.c,
        t_values=d.t_values if args.t is None else args.t,
        cert_N=args.N,
    )


def _table(rows: list[dict], columns: Sequence[str], fmt: str) -> str:
    if fmt == "json":
        return dumps_json(rows)
    lines = [",".join(columns)]
    for r in rows:
        lines.append(",".join("" if r[k] is None else fmt_float(r[k]) if isinstance(r[k], float) else str(r[k])
                              for k in columns))
    return "\n".join(lines) + "\n"


def _cmd_eval(args, pol):
    q, x = _one(args.q, "q"), _one(args.x, "x")
    ev = FUNCTIONS[args.fn](x, q, pol)
    row = {"fn": args.fn, "q": q, "x": x, "value": ev.value, "err": ev.err}
    text = dumps_json(row) if args.fmt == "json" else _table([row], list(row), "csv")
    return text, EXIT_OK


def _cmd_sweep(args, pol):
    qs = args.q if args.q is not None else DEFAULT_GRID.q_values
    xs = args.x if args.x is not None else DEFAULT_GRID.x_values
    if not qs or not xs:
        raise DomainError("empty grid")
    rows = []
    for q, x in itertools.product(sorted(qs), sorted(xs)):
        ev = FUNCTIONS[args.fn](x, q, pol)
        rows.append({"fn": args.fn, "q": q, "x": x, "value": ev.value, "err": ev.err})
    return _table(rows, ("fn", "q", "x", "value", "err"), args.fmt), EXIT_OK


def _cmd_constants(args, pol):
    qs = args.q if args.q is not None else (0.5,)
    ss = args.s if args.s is not None else (0.5,)
    if not qs or not ss:
        raise DomainError("empty grid")
    rows = []
    for q, s in itertools.product(sorted(qs), sorted(ss)):
        k = sharp_constants(q, s, pol)
        rows.append({"q": k.q, "s": k.s, "b": k.b, "a_mean": k.a_mean.value, "a_mean_err": k.a_mean.err, "aq": k.aq})
    if args.fmt == "json":
        return dumps_json(rows[0] if len(rows) == 1 else rows), EXIT_OK
    return _table(rows, ("q", "s", "b", "a_mean", "a_mean_err", "aq"), "csv"), EXIT_OK


def _cmd_certify(args, pol):
    if args.N < 2:
        raise DomainError("--N must be >= 2")
    qs = args.q if args.q is not None else DEFAULT_GRID.cert_q_values
    if not qs:
        raise DomainError("empty q grid")
    s = _one(args.s, "s") if args.s is not None else None
    c = _one(args.c, "c") if args.c is not None else None
    fam = Family(FamilyId(args.family), s=s, c=c)
    rep = certify_signs(fam, args.N, qs)
    return render(rep, args.fmt), EXIT_OK if rep.verdict else EXIT_FAIL


def _cmd_verify(args, pol):
    grid = _grid(args)
    ids = list(TheoremId) if args.theorem == "all" else [TheoremId(args.theorem)]
    reports = [verify_theorem(t, grid, pol) for t in ids]
    text = render(reports if len(reports) > 1 else reports[0], args.fmt)
    return text, EXIT_OK if all(r.verdict for r in reports) else EXIT_FAIL


COMMANDS = {
    "eval": _cmd_eval,
    "sweep": _cmd_sweep,
    "constants": _cmd_constants,
    "certify": _cmd_certify,
    "verify": _cmd_verify,
}


def dispatch(argv: Sequence[str] | None = None) -> int:
    """Run one subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.show_defaults:
            sys.stdout.write(dumps_json(DEFAULT_GRID.as_dict()))
            return EXIT_OK
        if args.command is None:
            raise UsageError("a subcommand is required (eval, constants, certify, verify, sweep)")
        pol = TruncationPolicy(target_tol=args.tol)
        text, code = COMMANDS[args.command](args, pol)
        write_text(text, args.out)
        return code
    except UsageError as exc:
        print(f"qgamma: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ValueError, ConvergenceError) as exc:
        print(f"qgamma: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"qgamma: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
