#!/usr/bin/env python3
"""
q-Freud recurrence coefficients: compute, verify and compare

    python3 scripts/qfreud.py coeffs --method forward --q 0.9 --alpha 5 --c -1 --digits 200 --n 200
    python3 scripts/qfreud.py verify --check bracket --q 0.9 --alpha 5 --c -1
    python3 scripts/qfreud.py compare --q 0.5 --alpha 2 --c=-5/2 --methods forward@20,fixedpoint:1,fixedpoint:3

Negative fractions need the --c=-1/3 form so argparse does not read them as options.
"""
import sys
import os
import argparse
import logging
from typing import List, Optional

from pydantic import ValidationError

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.cli.commands import run
from src.cli.config import CHECKS, METHODS, build_run_config
from src.qcore.errors import ConfigurationError


def _model_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=str, default=None,
                        help="key=value config file (overrides config/config.yaml)")
    parser.add_argument("--q", type=str, default=None, help="Lattice base q in (0, 1)")
    parser.add_argument("--alpha", type=str, default=None, help="Weight exponent alpha > -1")
    parser.add_argument("--c", type=str, default=None, help="Weight parameter c (c > 0 needs --exploratory)")
    parser.add_argument("--digits", type=int, default=None, help="Decimal digits of working precision")
    parser.add_argument("--n", type=int, default=None, help="Highest index N")
    parser.add_argument("--output", type=str, default=None, help="CSV path (stdout if omitted)")
    parser.add_argument("--exploratory", action="store_true", default=None,
                        help="Permit c > 0")
    parser.add_argument("--allow-low-precision", action="store_true", default=None,
                        help="Permit fewer than 30 digits")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for INFO, -vv for DEBUG logging on stderr")


def _solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--allow-singular", action="store_true", default=None,
                        help="Truncate forward runs at a singular step instead of failing")
    parser.add_argument("--iterations", type=int, default=None,
                        help="fixedpoint: emit T^k(0, 0) for this k instead of solving")
    parser.add_argument("--max-iter", type=int, default=None, help="Iteration cap for T")
    parser.add_argument("--tol", type=str, default=None, help="Bracket width target for T")
    parser.add_argument("--policy", type=str, default=None, choices=["shrink", "clamp"],
                        help="Boundary policy of T")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Recurrence coefficients of q-Freud orthogonal polynomials")
    subparsers = parser.add_subparsers(dest="command", required=True)

    coeffs = subparsers.add_parser("coeffs", help="Write y_n and a_n^2 as CSV")
    _model_flags(coeffs)
    _solver_flags(coeffs)
    coeffs.add_argument("--method", type=str, default=None, choices=list(METHODS),
                        help="Coefficient method")

    verify = subparsers.add_parser("verify", help="Run one verification suite")
    _model_flags(verify)
    _solver_flags(verify)
    verify.add_argument("--check", type=str, default=None, choices=list(CHECKS), help="Suite to run")
    verify.add_argument("--check-tol", type=str, default=None, help="Pass threshold")
    verify.add_argument("--method", type=str, default=None, choices=list(METHODS),
                        help="Coefficient method for sequence checks")
    verify.add_argument("--points", type=int, default=None, help="Pearson: number of lattice points")
    verify.add_argument("--variant", type=str, default=None, choices=["quartic", "general"],
                        help="uv: form of the two-row system")
    verify.add_argument("--parity", type=str, default=None, choices=["even", "odd"],
                        help="confinement: parity of the singular index")
    verify.add_argument("--index", type=int, default=None, help="confinement/qpv: index n")
    verify.add_argument("--y-before", type=str, default=None,
                        help="confinement: y_(n-1), a number or 'critical' (default: oracle value)")
    verify.add_argument("--epsilon", type=str, default=None, help="confinement: comma-separated epsilons")
    verify.add_argument("--steps", type=int, default=None, choices=[4, 8], help="confinement: steps")
    verify.add_argument("--a", type=str, default=None, help="dp1: Freud parameter a")
    verify.add_argument("--n-max", type=int, default=None, help="dp1: largest n")
    verify.add_argument("--q-family", type=str, default=None, help="dp1: comma-separated q values")
    verify.add_argument("--kappa", type=str, default=None, help="qpv: comma-separated kappa values")
    verify.add_argument("--u", type=str, default=None, help="qpv: u value")
    verify.add_argument("--v", type=str, default=None, help="qpv: v value")

    compare = subparsers.add_parser("compare", help="Align sequences from several methods")
    _model_flags(compare)
    _solver_flags(compare)
    compare.add_argument("--methods", type=str, default=None,
                         help="Comma-separated name[@digits][:iterations] specs")
    compare.add_argument("--agree-digits", type=int, default=None,
                         help="Digits of agreement for the divergence index")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )

    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "verbose")}
    try:
        config = build_run_config(args.command, flags, config_path=args.config)
    except (ValidationError, ConfigurationError) as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
