"""
Command-Line Workbench
Batch front end: one verb per invocation, human lines or JSON on stdout,
diagnostics on stderr

    python cli.py derive "x^2" --at 3 --backend lc
    python cli.py compare "1/n^2" "1/n" --backend omega
    python cli.py ivt "x^2-2" --interval 1 2 --digits 6
"""

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from core.access_control import ALL_BACKENDS, BACKEND_ACCESS_MATRIX
from core.errors import BTrackError, ConfigError
from core.workbench import run_command
from schemas import Command

logger = logging.getLogger("cli")

VERB_HELP = {
    "derive": "st(dy/dx) of EXPR at --at",
    "derive2": "second differential ratio of EXPR at --at",
    "cont": "continuity of EXPR at --at",
    "ucont": "microcontinuity of EXPR on --interval (lc)",
    "classify": "magnitude class, sign and order of ELEMENT",
    "compare": "order relation between two elements",
    "st": "standard part of ELEMENT",
    "euler-exp": "(1 + kz/N)^N for K Z (omega)",
    "binom": "binomial terms of (1 + kz/N)^N for K Z (omega)",
    "hsum": "hyperfinite sum of a rule in k (omega)",
    "hprod": "hyperfinite product of a rule in k (omega)",
    "ivt": "decimal zero of EXPR on --interval (lc)",
    "sumthm": "sum-theorem remainder of u_k(x) near --at (omega)",
    "transfer": "spot-check LHS = RHS at backend points",
    "ultrademo": "Cauchy-quotient vs ultrapower reading of a rule in n (omega)",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cli.py",
        description="Calculus with infinitesimals over Levi-Civita, sequence and rational-function backends",
        epilog="verbs:\n" + "\n".join(f"  {verb:<10} {text}" for verb, text in VERB_HELP.items()),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("verb", choices=list(BACKEND_ACCESS_MATRIX), metavar="verb")
    parser.add_argument("args", nargs="*", help="expressions or rationals, depending on the verb")
    parser.add_argument("--backend", choices=ALL_BACKENDS)
    parser.add_argument("--at", help="standard point (or backend point for transfer)")
    parser.add_argument("--interval", nargs=2, metavar=("A", "B"))
    parser.add_argument("--digits", type=int)
    parser.add_argument("--terms", type=int)
    parser.add_argument("--N", dest="N", metavar="RULE", help="hyperinteger rule in n (default n)")
    parser.add_argument("--offset", help="sumthm hyper-offset: -1/N, +2/N or a rule in n")
    parser.add_argument("--truncation", type=int, help="truncation_order")
    parser.add_argument("--precision", type=int, help="working_precision")
    parser.add_argument("--cutoff", type=int, help="sequence_cutoff")
    parser.add_argument("--tol", help="st_tolerance, e.g. 1e-9 or 1/1000000000")
    parser.add_argument("--decimal", type=int, metavar="D", help="print values with D decimals")
    parser.add_argument("--json", action="store_true", help="emit the JSON report")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug diagnostics on stderr")
    return parser


def _report_error(exc: BTrackError) -> int:
    print(f"{exc.name}: {exc.message}", file=sys.stderr)
    print(f"  remedy: {exc.remedy}", file=sys.stderr)
    return exc.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    options = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if options.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    fields = vars(options).copy()
    output_json = fields.pop("json")
    fields.pop("verbose")
    try:
        command = Command(**fields)
    except ValidationError as exc:
        first = exc.errors()[0]
        return _report_error(ConfigError(f"{'.'.join(str(p) for p in first['loc'])}: {first['msg']}"))

    try:
        outcome = run_command(command)
    except BTrackError as exc:
        logger.debug(f"❌ {command.verb} failed", exc_info=True)
        return _report_error(exc)

    if output_json:
        print(outcome.report.model_dump_json(indent=2))
    else:
        for line in outcome.lines:
            print(line)
    return outcome.exit_code


if __name__ == "__main__":
    if hasattr(sys.stdout, "reconfigure"):
        sys.stdout.reconfigure(encoding="utf-8")
    sys.exit(main())
