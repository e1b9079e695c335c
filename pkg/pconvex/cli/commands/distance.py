"""
distance subcommand: Banach-Mazur distance upper estimate between two bodies.
"""

import math
import argparse
import logging

from pconvex.cli.commands.common import (
    CommandContext,
    load_map,
    load_space,
    require_seed,
    resolve_threads,
    resolve_tol
)
from pconvex.cli.serialization import build_manifest, emit_json, write_manifest
from pconvex.models.files import MapFile, write_json
from pconvex.services.distance_service import distance_estimate
from pconvex.utils.helpers import format_float

logger = logging.getLogger(__name__)


def cmd_distance(args: argparse.Namespace, context: CommandContext) -> int:
    seed = require_seed(args)
    tol = resolve_tol(args)
    X = load_space(args.x, tol)
    Y = load_space(args.y, tol)
    initial_maps = [load_map(path) for path in args.initial_map or []]

    estimate = distance_estimate(X, Y, args.budget, args.restarts, seed,
                                 initial_maps=initial_maps, threads=resolve_threads(args))
    payload = {
        "upper_bound": estimate.upper_bound,
        "evaluations": estimate.evaluations,
        "seed": estimate.seed,
        "restarts": estimate.restarts,
        "restart_values": [v if math.isfinite(v) else None for v in estimate.restart_values],
        "best_map": MapFile.from_map(estimate.best_map).model_dump(),
    }

    if args.output:
        write_json(args.output, payload)
        write_manifest(args.output, build_manifest(
            "distance", {"x": args.x, "y": args.y, "budget": args.budget,
                         "restarts": args.restarts, "initial_maps": args.initial_map or []},
            seed, context.run_id, [str(args.output)]))
    elif args.json:
        emit_json(context.stdout, payload)
    else:
        context.stdout.write(format_float(estimate.upper_bound) + "\n")
    return 0


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser(
        "distance", parents=[common],
        help="Upper estimate of the Banach-Mazur distance d(X, Y)",
        description="Random-restart Nelder-Mead search over maps with |det| = 1. "
                    "The value is an upper bound, never a certified distance.")
    parser.add_argument("x", help="Body JSON file of X")
    parser.add_argument("y", help="Body JSON file of Y")
    parser.add_argument("--budget", type=int, default=5000, help="Objective evaluations (default 5000)")
    parser.add_argument("--restarts", type=int, default=4, help="Random starts (default 4)")
    parser.add_argument("--initial-map", action="append", default=None,
                        help="Map JSON file used as an extra start; repeatable")
    parser.add_argument("--output", default=None, help="Write the result here instead of stdout")
    parser.set_defaults(func=cmd_distance)
