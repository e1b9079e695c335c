"""
Arguments and helpers shared by every subcommand.
"""

import sys
import argparse
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, TextIO

import numpy as np

from pconvex.models.files import BodyFile, MapFile
from pconvex.core.types import LinearMap
from pconvex.services.norm_service import PNormedSpace
from pconvex.cli.serialization import build_manifest, emit_table, write_output
from pconvex.utils.validators import InputValidator, ensure_valid

logger = logging.getLogger(__name__)

validator = InputValidator()


@dataclass
class CommandContext:
    """Per-invocation state handed to every command."""

    run_id: str
    stdout: TextIO = field(default_factory=lambda: sys.stdout)


def common_parser() -> argparse.ArgumentParser:
    """Options accepted after every subcommand."""
    parser = argparse.ArgumentParser(add_help=False)
    group = parser.add_argument_group("common options")
    group.add_argument("--seed", type=int, default=None,
                       help="Seed in [0, 2^63); required by stochastic commands")
    group.add_argument("--threads", type=int, default=None,
                       help="Worker threads (default: PCONVEX_THREADS or 1)")
    group.add_argument("--tol", type=float, default=None,
                       help="Rank/feasibility tolerance (default: PCONVEX_TOL or 1e-10)")
    group.add_argument("--log-level", default=None,
                       choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
                       help="Log level on stderr (default: PCONVEX_LOG_LEVEL or WARNING)")
    group.add_argument("--json", action="store_true",
                       help="Print results as JSON instead of plain text")
    return parser


def add_output_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", choices=["csv", "json"], default="csv",
                        help="Table format (default: csv)")
    parser.add_argument("--output", default=None,
                        help="Output file; a manifest is written next to it. Default: stdout")


def resolve_tol(args: argparse.Namespace) -> Optional[float]:
    if args.tol is None:
        return None
    return ensure_valid(validator.validate_tolerance(args.tol), "tol")


def resolve_threads(args: argparse.Namespace) -> Optional[int]:
    if args.threads is None:
        return None
    return ensure_valid(validator.validate_count(args.threads, "threads"), "threads")


def require_seed(args: argparse.Namespace) -> int:
    return ensure_valid(validator.validate_seed(args.seed), "seed")


def load_space(path: str, tol: Optional[float] = None) -> PNormedSpace:
    body_file = BodyFile.load(path)
    return PNormedSpace(body_file.to_body(tol), name=body_file.name)


def load_map(path: str) -> LinearMap:
    return MapFile.load(path).to_map()


def parse_vector(text: str, dim: int) -> np.ndarray:
    return ensure_valid(validator.validate_vector_string(text, dim), "vector")


def parse_exponent(value: float, allow_one: bool = False, field_name: str = "p") -> float:
    return ensure_valid(validator.validate_exponent(value, allow_one=allow_one,
                                                    field_name=field_name), field_name)


def finish_table(args: argparse.Namespace, context: CommandContext, command: str,
                 parameters: Dict[str, Any], columns: List[str],
                 rows: List[Dict[str, Any]]) -> int:
    """Write the table to --output (with manifest) or print it."""
    if args.output:
        manifest = build_manifest(command, parameters, getattr(args, "seed", None),
                                  context.run_id, [str(args.output)])
        write_output(args.output, args.out, columns, rows, manifest)
    else:
        emit_table(context.stdout, args.out, columns, rows)
    return 0
