"""
pconvex command line.

    pconvex gauge BODY VECTOR
    pconvex membership BODY VECTOR
    pconvex reduce BODY COMBINATION [--zero]
    pconvex opnorm MAP FROM TO
    pconvex distance X Y --seed S [--budget B] [--restarts R]
    pconvex make-body (--lp N P | --gluskin N P --seed S)
    pconvex experiment {volume,lemma7,diameter,envelope,axioms} --seed S [--out csv|json]

Results go to stdout (or --output files); logs and error objects go to
stderr. Exit codes: 0 success, 2 invalid input, 3 budget exceeded, 4
numerical failure.
"""

import sys
import argparse
import logging
from typing import List, Optional

from pconvex import __version__
from pconvex.cli.commands import bodies, distance, experiments, geometry, reduction
from pconvex.cli.commands.common import CommandContext, common_parser
from pconvex.cli.error_handlers import handle_exception
from pconvex.config import get_settings
from pconvex.utils.error_utils import EXIT_SUCCESS
from pconvex.utils.helpers import generate_run_id
from pconvex.utils.performance_monitor import get_performance_monitor

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

COMMAND_MODULES = [geometry, reduction, distance, bodies, experiments]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pconvex",
        description="Caratheodory reduction, gauges and Banach-Mazur experiments "
                    "for p-convex bodies (0 < p < 1).")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    common = common_parser()
    for module in COMMAND_MODULES:
        module.register(subparsers, common)
    return parser


def configure_logging(level: Optional[str]) -> None:
    if level is None:
        level = get_settings().log_level
    logging.basicConfig(level=getattr(logging, level), format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger().setLevel(getattr(logging, level))


def _command_name(args: argparse.Namespace) -> str:
    experiment = getattr(args, "experiment", None)
    return f"{args.command} {experiment}" if experiment else args.command


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one command.

    Args:
        argv: Arguments without the program name, defaults to sys.argv[1:]

    Returns:
        Process exit code
    """
    args = build_parser().parse_args(argv)
    run_id = generate_run_id()
    command = _command_name(args)

    monitor = get_performance_monitor()
    with monitor.track_run(run_id, command) as metrics:
        try:
            configure_logging(args.log_level)
            logger.info(f"Run {run_id} started: {command}")
            exit_code = args.func(args, CommandContext(run_id=run_id))
        except Exception as e:
            exit_code = handle_exception(e, run_id)
        metrics.exit_code = exit_code

    if exit_code == EXIT_SUCCESS:
        logger.info(f"Run {run_id} completed")
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
