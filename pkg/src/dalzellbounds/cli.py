"""Command line interface.

Exit status: 0 success, 1 usage error, 2 check-suite failure, 3 resource limit exceeded.
"""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction

from .bounds import (
    BoundMethod,
    MethodKind,
    SeriesId,
    bound_for,
    certify_bound_pair,
    true_error,
)
from .dalzell import DEFAULT_LIMIT, ResourceLimitError, constant_approximation, dalzell_integral
from .exactnum import AffineValue, Constant, evaluate_affine, format_rational, to_decimal
from .report import FORMATS, PRESETS, CheckLimits, TableSpec, build_table, render, run_check_suite

EXIT_OK, EXIT_USAGE, EXIT_CHECK, EXIT_LIMIT = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be a nonnegative integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dalzellbounds", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("integral", help="exact value of I(m, n)")
    p.add_argument("--m", type=_nonneg, required=True)
    p.add_argument("--n", type=_nonneg, required=True)
    p.add_argument("--digits", type=_positive, default=20)
    p.add_argument("--limit", type=_positive, default=DEFAULT_LIMIT, help="largest allowed exponent")

    p = sub.add_parser("approx", help="rational approximation of pi or ln 2 from I(m, n)")
    p.add_argument("--m", type=_nonneg, required=True)
    p.add_argument("--n", type=_nonneg, required=True)
    p.add_argument("--digits", type=_positive, default=30)
    p.add_argument("--limit", type=_positive, default=DEFAULT_LIMIT)

    p = sub.add_parser("bounds", help="error bounds for one partial sum")
    p.add_argument("--series", choices=[s.value for s in SeriesId], required=True)
    p.add_argument("--k", type=_positive, required=True)
    how = p.add_mutually_exclusive_group(required=True)
    how.add_argument("--n", type=_positive, help="Dalzell construction with this even n")
    how.add_argument("--prop", type=_positive, help="closed-form proposition 1-6")
    how.add_argument("--method", choices=["leibniz", "calabrese", "johnsonbaugh"])
    p.add_argument("--j", type=_positive, help="order for --method johnsonbaugh")
    p.add_argument("--lower-from", choices=["auto", "next", "previous"], default="auto")
    p.add_argument("--digits", type=_positive, default=12)
    p.add_argument("--limit", type=_positive, default=DEFAULT_LIMIT)

    p = sub.add_parser("table", help="comparison table of bounds")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--series", choices=[s.value for s in SeriesId])
    p.add_argument("--k", type=_int_list, help="comma-separated k values")
    p.add_argument("--side", choices=["upper", "lower"], default="upper")
    p.add_argument("--methods", help="comma-separated, e.g. leibniz,johnsonbaugh:2,prop:1,dalzell:4")
    p.add_argument("--format", choices=FORMATS, default="text")
    p.add_argument("--digits", type=_positive, default=12)

    p = sub.add_parser("check", help="run the invariant check suite")
    defaults = CheckLimits()
    p.add_argument("--m-max", type=_positive, default=defaults.m_max)
    p.add_argument("--n-max", type=_positive, default=defaults.n_max)
    p.add_argument("--k-max", type=_positive, default=defaults.k_max)
    p.add_argument("--digits", type=_positive, default=defaults.digits)
    return parser


def _decimal_interval(lo: Fraction, hi: Fraction, digits: int) -> str:
    return to_decimal((lo + hi) / 2, digits)


def cmd_integral(args) -> int:
    v = dalzell_integral(args.m, args.n, args.limit)
    lo, hi = evaluate_affine(v, args.digits + 2)
    print(f"I({args.m},{args.n}) = {v}")
    print(f"class: {v.backhouse_class}")
    print(f"value: {_decimal_interval(lo, hi, args.digits)}")
    return EXIT_OK


def cmd_approx(args) -> int:
    a = constant_approximation(args.m, args.n, args.limit)
    name = "pi" if a.target is Constant.PI else "ln2"
    relation = "<" if a.side.value == "TargetBelow" else ">"
    diff = AffineValue(a.value, Fraction(-1), Fraction(0)) if a.target is Constant.PI \
        else AffineValue(a.value, Fraction(0), Fraction(-1))
    lo, hi = evaluate_affine(diff, args.digits + 2)
    print(f"target: {name}")
    print(f"rho: {format_rational(a.value)}")
    print(f"side: {a.side} ({name} {relation} rho)")
    print(f"|{name} - rho|: {to_decimal(abs((lo + hi) / 2), args.digits)}")
    return EXIT_OK


def _bounds_method(args) -> BoundMethod:
    if args.n is not None:
        return BoundMethod(MethodKind.DALZELL, args.n, args.lower_from)
    if args.prop is not None:
        return BoundMethod(MethodKind.PROPOSITION, args.prop)
    if args.method == "johnsonbaugh":
        if args.j is None:
            raise UsageError("--method johnsonbaugh needs --j")
        return BoundMethod(MethodKind.JOHNSONBAUGH, args.j)
    if args.j is not None:
        raise UsageError("--j only applies to --method johnsonbaugh")
    return BoundMethod(MethodKind(args.method))


def cmd_bounds(args) -> int:
    pair = bound_for(_bounds_method(args), args.series, args.k, limit=args.limit)
    print(f"series: {args.series}")
    print(f"k: {args.k}")
    print(f"method: {pair.method.label}")
    if pair.method.m_exponents:
        print(f"exponents m: upper {pair.method.m_exponents[0]}, lower {pair.method.m_exponents[1]}")
    if pair.lower is None:
        print("lower: -")
    else:
        print(f"lower: {format_rational(pair.lower)} = {to_decimal(pair.lower, args.digits)}")
    print(f"upper: {format_rational(pair.upper)} = {to_decimal(pair.upper, args.digits)}")
    print(f"true error: {true_error(args.series, args.k, args.digits)}")
    print(f"certified: {'yes' if certify_bound_pair(pair) else 'NO'}")
    for note in pair.warnings:
        print(f"warning: {note}")
    return EXIT_OK


def cmd_table(args) -> int:
    if args.preset:
        if args.series or args.k or args.methods:
            raise UsageError("--preset cannot be combined with --series/--k/--methods")
        base = PRESETS[args.preset]
        spec = TableSpec(base.series, base.ks, base.methods, base.side, args.digits)
    else:
        if not (args.series and args.k and args.methods):
            raise UsageError("give --preset, or all of --series, --k and --methods")
        methods = tuple(BoundMethod.parse(t) for t in args.methods.split(",") if t.strip())
        spec = TableSpec(SeriesId(args.series), tuple(args.k), methods, args.side, args.digits)
    sys.stdout.write(render(build_table(spec), args.format))
    return EXIT_OK


def cmd_check(args) -> int:
    report = run_check_suite(CheckLimits(args.m_max, args.n_max, args.k_max, args.digits))
    sys.stdout.write(report.render())
    return report.exit_status


COMMANDS = {
    "integral": cmd_integral,
    "approx": cmd_approx,
    "bounds": cmd_bounds,
    "table": cmd_table,
    "check": cmd_check,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return COMMANDS[args.command](args)
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
