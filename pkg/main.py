"""
main.py
────────
Entry point for the signrank CLI.

Flow
─────
  1. Parse arguments (one sub-command per analysis)
  2. Load settings (.env + SIGRANK_* over defaults; flags override both)
  3. Setup logger (stderr console, optional file in --log-dir)
  4. Manager routes the command to its handler
  5. Print the JSON report on stdout

Exit codes
──────────
  0  success
  1  a predicate command answered false and --strict was given
  2  input error (bad file, bad shape, bad arguments)

Usage
──────
  python main.py termrank example.json
  python main.py rank-bounds example.json --restarts 50 --seed 7 --pretty
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import uuid
from typing import Optional, Sequence

from pydantic import ValidationError

from logger_config import setup_logger
from manager import Manager
from qualtensor.errors import TensorError
from settings import load_settings

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FALSE, EXIT_INPUT = 0, 1, 2


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return value


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="indent the JSON report")
    common.add_argument("--strict", action="store_true", help="exit 1 when a predicate is false")
    common.add_argument("--verbose", action="store_true", help="INFO logging on stderr")
    common.add_argument("--debug", action="store_true", help="DEBUG logging on stderr")
    common.add_argument("--log-dir", default=None, help="also write signrank_{session}.log here")

    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=_non_negative_int, default=None)

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--restarts", type=_positive_int, default=None)
    search.add_argument("--iterations", type=_positive_int, default=None)
    search.add_argument("--r-max", dest="r_max", type=_positive_int, default=None)
    search.add_argument("--samples", type=_positive_int, default=None)

    parser = argparse.ArgumentParser(prog="signrank", description="Qualitative tensor analysis.")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help_text: str, *parents: argparse.ArgumentParser) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help_text, parents=[common, *parents])

    command("analyze", "run every analysis on a pattern", seeded, search).add_argument("file")
    command("condense", "condensed pattern").add_argument("file")
    command("termrank", "term rank and matching witness").add_argument("file")
    command("mr1", "does some member have rank one").add_argument("file")
    command("det2", "exact determinant of a dimension-2 tensor").add_argument("file")
    command("rank222", "real rank of a 2x2x2 tensor").add_argument("file")
    command("rank-bounds", "bounds on mr and Mr", seeded, search).add_argument("file")

    sns = command("sns-check", "necessary SNS test and singular-member sampling", seeded)
    sns.add_argument("file")
    sns.add_argument("--trials", type=_positive_int, default=None)

    inverse = command("sign-inverse", "order-2 sign inverse decision")
    inverse.add_argument("file")
    inverse.add_argument("--side", choices=("left", "right"), required=True)

    product = command("product", "general product A·B")
    product.add_argument("a")
    product.add_argument("b")

    apply = command("apply", "compute Ax^(k-1)")
    apply.add_argument("file")
    apply.add_argument("--x", required=True, help='comma separated rationals, e.g. "1,2/3,-4"')

    sample = command("sample", "write members of the qualitative class", seeded)
    sample.add_argument("file")
    sample.add_argument("--count", type=_positive_int, required=True)
    sample.add_argument("--out", required=True)

    return parser


def _emit(payload: dict, pretty: bool) -> None:
    if pretty:
        text = json.dumps(payload, indent=2)
    else:
        text = json.dumps(payload, separators=(",", ":"))
    sys.stdout.write(text + "\n")


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    session_id = uuid.uuid4().hex[:12]

    # ── Settings and logging FIRST ────────────────────────────────────────────
    try:
        settings = load_settings()
    except ValueError as exc:
        _emit({"error": str(exc), "type": type(exc).__name__}, args.pretty)
        return EXIT_INPUT

    level = logging.DEBUG if args.debug else logging.INFO if args.verbose else logging.WARNING
    setup_logger(session_id=session_id, level=level, log_dir=args.log_dir or settings.log_dir)
    logger.info(f"[main] command.received | session={session_id} | command={args.command}")

    try:
        result = Manager(settings).dispatch(args, session_id)
    except (TensorError, ValidationError, OSError) as exc:
        logger.error(f"[main] command.rejected | command={args.command} | error={exc}")
        _emit({"error": str(exc), "type": type(exc).__name__}, args.pretty)
        return EXIT_INPUT

    _emit(result.report, args.pretty)

    if args.strict and result.predicate is False:
        logger.info(f"[main] predicate.false | command={args.command}")
        return EXIT_FALSE
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
