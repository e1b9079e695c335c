"""
reduce subcommand: Caratheodory reduction of a combination file.
"""

import argparse
import logging

from pconvex.cli.commands.common import CommandContext, resolve_tol
from pconvex.cli.serialization import build_manifest, emit_json, write_manifest
from pconvex.exceptions import DimensionMismatchError
from pconvex.models.files import BodyFile, CombinationFile, write_json
from pconvex.services.caratheodory_service import caratheodory_reduce, caratheodory_zero

logger = logging.getLogger(__name__)


def cmd_reduce(args: argparse.Namespace, context: CommandContext) -> int:
    """
    Reduce a combination over a body's generators.

    The result document holds the reduced combination, both weights, the term
    count and the number of passes. It is always JSON.
    """
    tol = resolve_tol(args)
    body_file = BodyFile.load(args.body)
    body = body_file.to_body(tol)
    comb = CombinationFile.load(args.combination).to_combination()
    if comb.dim != body.dim:
        raise DimensionMismatchError(body.dim, comb.dim, field="combination")

    reduce = caratheodory_zero if args.zero else caratheodory_reduce
    result = reduce(comb, body.generators, body.p, tol)
    payload = {
        "combination": CombinationFile.from_combination(result.combination).to_json_dict(),
        "weight_before": result.weight_before,
        "weight_after": result.weight_after,
        "term_count": result.term_count,
        "iterations": result.iterations,
    }
    logger.info(f"Run {context.run_id}: {len(comb)} terms reduced to {result.term_count}")

    if args.output:
        write_json(args.output, payload)
        write_manifest(args.output, build_manifest(
            "reduce", {"body": args.body, "combination": args.combination, "zero": args.zero},
            None, context.run_id, [str(args.output)]))
    else:
        emit_json(context.stdout, payload)
    return 0


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser(
        "reduce", parents=[common],
        help="Rewrite a combination on linearly independent generators",
        description="Caratheodory reduction: at most n terms on independent generators "
                    "without increasing the weight; with --zero, a representation of 0 "
                    "is cut to at most n+1 terms.")
    parser.add_argument("body", help="Body JSON file")
    parser.add_argument("combination", help="Combination JSON file")
    parser.add_argument("--zero", action="store_true", help="The combination represents 0")
    parser.add_argument("--output", default=None, help="Write the result here instead of stdout")
    parser.set_defaults(func=cmd_reduce)
