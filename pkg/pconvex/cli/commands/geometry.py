"""
gauge, membership and opnorm subcommands.
"""

import argparse
import logging

from pconvex.cli.commands.common import (
    CommandContext,
    load_map,
    load_space,
    parse_vector,
    resolve_threads,
    resolve_tol
)
from pconvex.cli.serialization import emit_json
from pconvex.core.types import PCombination
from pconvex.models.files import CombinationFile
from pconvex.services.gauge_service import gauge_bruteforce, membership
from pconvex.services.norm_service import operator_norm
from pconvex.utils.helpers import format_float

logger = logging.getLogger(__name__)


def _print_witness(context: CommandContext, witness: PCombination) -> None:
    for term in witness.terms:
        context.stdout.write(f"{term.index} {term.sign:+d} {format_float(term.lam)}\n")


def cmd_gauge(args: argparse.Namespace, context: CommandContext) -> int:
    """
    Print the gauge of a vector and a witness combination.

    Plain output: the value on the first line, then one "index sign lambda"
    line per witness term.
    """
    space = load_space(args.body, resolve_tol(args))
    x = parse_vector(args.vector, space.dim)
    value, witness = gauge_bruteforce(x, space.body, resolve_tol(args))
    logger.info(f"Run {context.run_id}: gauge {value:.17g} with {len(witness)} witness terms")

    if args.json:
        emit_json(context.stdout, {
            "value": value,
            "witness": CombinationFile.from_combination(witness).to_json_dict()
        })
    else:
        context.stdout.write(format_float(value) + "\n")
        _print_witness(context, witness)
    return 0


def cmd_membership(args: argparse.Namespace, context: CommandContext) -> int:
    """Decide membership; exit 0 either way, the answer is in the output."""
    space = load_space(args.body, resolve_tol(args))
    x = parse_vector(args.vector, space.dim)
    inside, witness = membership(x, space.body, resolve_tol(args))

    if args.json:
        emit_json(context.stdout, {
            "inside": inside,
            "witness": None if witness is None
            else CombinationFile.from_combination(witness).to_json_dict()
        })
    else:
        context.stdout.write(("inside" if inside else "outside") + "\n")
        if witness is not None:
            _print_witness(context, witness)
    return 0


def cmd_opnorm(args: argparse.Namespace, context: CommandContext) -> int:
    T = load_map(args.map)
    from_space = load_space(args.from_body, resolve_tol(args))
    to_space = load_space(args.to_body, resolve_tol(args))
    value = operator_norm(T, from_space, to_space, threads=resolve_threads(args))

    if args.json:
        emit_json(context.stdout, {"operator_norm": value})
    else:
        context.stdout.write(format_float(value) + "\n")
    return 0


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser(
        "gauge", parents=[common],
        help="Gauge of a vector with respect to a body",
        description="Print ||x|| for the body's gauge and a witness combination. "
                    "Pass negative vectors after '--'.")
    parser.add_argument("body", help="Body JSON file")
    parser.add_argument("vector", help="Comma separated coordinates, e.g. 0.25,0.25")
    parser.set_defaults(func=cmd_gauge)

    parser = subparsers.add_parser(
        "membership", parents=[common],
        help="Decide whether a vector lies in a body")
    parser.add_argument("body", help="Body JSON file")
    parser.add_argument("vector", help="Comma separated coordinates")
    parser.set_defaults(func=cmd_membership)

    parser = subparsers.add_parser(
        "opnorm", parents=[common],
        help="Operator norm of a linear map between two bodies")
    parser.add_argument("map", help="Map JSON file")
    parser.add_argument("from_body", metavar="from", help="Source body JSON file")
    parser.add_argument("to_body", metavar="to", help="Target body JSON file")
    parser.set_defaults(func=cmd_opnorm)
