"""Command-line driver.

Exit codes: 0 success, 1 a check failed (or an operation's precondition
did not hold), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .expr import ParseError, format_hbar, form_to_json, parse
from .geometry import CoordinateChange, substitute
from .operators import (
    HbarForm,
    bv_delta,
    canonical_rep,
    d,
    hbar_d,
    homotopy_L,
    invert_omega,
    omega_wedge,
)
from .suites import SUITES, run_suite

OPS = {
    "d": d,
    "omega": omega_wedge,
    "L": homotopy_L,
    "delta": bv_delta,
    "invert-omega": invert_omega,
    "reduce": canonical_rep,
}


def _emit(value, as_json: bool) -> None:
    if as_json and not isinstance(value, HbarForm):
        print(json.dumps({"n": value.n, "expr": format_hbar(value), "terms": form_to_json(value)}))
    elif as_json:
        print(json.dumps({"n": value.n, "expr": format_hbar(value),
                          "levels": [form_to_json(c) for c in value.coeffs]}))
    else:
        print(format_hbar(value))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bvforms", description="Forms on odd symplectic superspace.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="normalize an expression")
    p.add_argument("expr")
    p.add_argument("--n", type=int)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("apply", help="apply an operator to an expression")
    p.add_argument("--op", required=True, choices=sorted(OPS) + ["hbar-d"])
    p.add_argument("--n", type=int)
    p.add_argument("--json", action="store_true")
    p.add_argument("expr")

    p = sub.add_parser("pullback", help="pull a primed-coordinate form back along a map")
    p.add_argument("--map", required=True, type=Path, dest="map_file")
    p.add_argument("--json", action="store_true")
    p.add_argument("expr")

    p = sub.add_parser("check", help="run a verification suite")
    p.add_argument("suite", choices=sorted(SUITES) + ["all"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-xdeg", type=int, default=3)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--seed", type=int, default=0)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "parse":
            _emit(parse(args.expr, args.n), args.json)
            return 0
        if args.command == "apply":
            value = parse(args.expr, args.n)
            if args.op == "hbar-d":
                if not isinstance(value, HbarForm):
                    value = HbarForm([value])
                _emit(hbar_d(value), args.json)
                return 0
            if isinstance(value, HbarForm):
                print(f"error: --op {args.op} takes an expression without h", file=sys.stderr)
                return 2
            _emit(OPS[args.op](value), args.json)
            return 0
        if args.command == "pullback":
            change = CoordinateChange.from_json(args.map_file.read_text())
            value = parse(args.expr, change.n)
            if isinstance(value, HbarForm):
                print("error: pullback takes an expression without h", file=sys.stderr)
                return 2
            _emit(substitute(value, change), args.json)
            return 0
        if args.command == "check":
            report = run_suite(args.suite, args.n, args.max_xdeg, args.seed)
            if args.format == "json":
                print(json.dumps(report.to_dict(), indent=2))
            else:
                print(report.to_text())
            return 0 if report.passed else 1
    except ParseError as exc:
        text = getattr(exc, "text", "")
        print(f"parse error: {exc}", file=sys.stderr)
        if text:
            print(f"  {text}\n  {' ' * exc.position}^", file=sys.stderr)
        return 2
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # covers bad parameters and failed operation preconditions
        print(f"error: {exc}", file=sys.stderr)
        return 2 if args.command == "check" else 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
