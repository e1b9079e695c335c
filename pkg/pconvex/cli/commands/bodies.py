"""
make-body subcommand: write an l_p cross body or a random Gluskin space.
"""

import argparse
import logging

from pconvex.cli.commands.common import CommandContext, parse_exponent, require_seed
from pconvex.cli.serialization import build_manifest, emit_json, write_manifest
from pconvex.models.files import BodyFile
from pconvex.services.gluskin_service import RandomSpaceSpec, random_gluskin_space
from pconvex.services.norm_service import PNormedSpace
from pconvex.utils.validators import InputValidator, ensure_valid

logger = logging.getLogger(__name__)

validator = InputValidator()


def cmd_make_body(args: argparse.Namespace, context: CommandContext) -> int:
    if args.lp is not None:
        n_text, p_text = args.lp
        seed = None
    else:
        n_text, p_text = args.gluskin
        seed = require_seed(args)
    try:
        n, p = int(n_text), float(p_text)
    except ValueError:
        n, p = -1, float("nan")
    n = ensure_valid(validator.validate_dimension(n), "n")
    p = parse_exponent(p, allow_one=True)

    if seed is None:
        space = PNormedSpace.lp(n, p)
    else:
        space = random_gluskin_space(RandomSpaceSpec(n, p, seed))
    body_file = BodyFile.from_body(space.body, name=args.name or space.name)

    if args.output:
        body_file.save(args.output)
        write_manifest(args.output, build_manifest(
            "make-body", {"kind": "lp" if seed is None else "gluskin", "n": n, "p": p},
            seed, context.run_id, [str(args.output)]))
        logger.info(f"Run {context.run_id}: wrote {body_file.name} to {args.output}")
    else:
        emit_json(context.stdout, body_file.model_dump(exclude_none=True))
    return 0


def register(subparsers, common: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser(
        "make-body", parents=[common],
        help="Write a body file: l_p cross body or random Gluskin space")
    kind = parser.add_mutually_exclusive_group(required=True)
    kind.add_argument("--lp", nargs=2, metavar=("N", "P"), help="Unit ball of l_p^N")
    kind.add_argument("--gluskin", nargs=2, metavar=("N", "P"),
                      help="p-conv{+-e_i, +-P_i} with N random sphere points (needs --seed)")
    parser.add_argument("--name", default=None, help="Body name stored in the file")
    parser.add_argument("--output", default=None, help="Body file to write; default stdout")
    parser.set_defaults(func=cmd_make_body)
