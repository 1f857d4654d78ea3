import argparse
import logging
import sys
from typing import Optional, Sequence

from app.commands import COMMANDS
from app.core.config import settings
from app.core.exceptions import SparseGreedyError
from app.core.log import configure_logging

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsegreedy",
        description="Greedy sparse subset selection with approximation-bound verification",
    )
    parser.add_argument("--log-level", default=settings.LOG_LEVEL,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], type=str.upper)
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand; 2 = invalid input, 3 = guard exceeded, 4 = solver failure."""
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code is None else int(e.code)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2

    configure_logging(args.log_level)
    try:
        return args.func(args)
    except SparseGreedyError as e:
        logger.error(f"{args.command} failed: {e.detail}")
        return e.exit_code
