"""
experiment subcommands: volume, lemma7, diameter, envelope and axioms.

Each writes one table (CSV by default) with a header row. Column lists are
fixed per subcommand and documented in docs/CLI_GUIDE.md.
"""

import argparse
import logging
from typing import Any, Dict, List, Optional

from pconvex.cli.commands.common import (
    CommandContext,
    add_output_arguments,
    finish_table,
    load_map,
    load_space,
    parse_exponent,
    require_seed,
    resolve_threads,
    resolve_tol
)
from pconvex.core.types import LinearMap
from pconvex.models.reports import ScalingRow
from pconvex.services.gluskin_service import (
    RandomSpaceSpec,
    ball_volume_lp,
    diameter_experiment,
    lemma7_experiment,
    random_gluskin_space,
    volume_mc,
    volume_upper_bound
)
from pconvex.services.norm_service import PNormedSpace, check_pnorm_axioms, envelope_sandwich_check
from pconvex.utils.rng import derive_seed
from pconvex.utils.validators import InputValidator, ensure_valid

logger = logging.getLogger(__name__)

validator = InputValidator()

VOLUME_COLUMNS = ["n", "p", "samples", "hits", "mean", "std_error", "exact", "upper_bound"]
LEMMA7_COLUMNS = ["n", "p", "t", "threshold", "trials", "hits", "empirical_probability",
                  "std_error", "volume", "volume_std_error", "ball_volume", "bound",
                  "vacuous", "consistent"]
ENVELOPE_COLUMNS = ["n", "p", "q", "space", "samples", "max_ratio", "bound",
                    "lower_violations", "upper_violations"]
AXIOM_COLUMNS = ["n", "p", "space", "samples", "positivity_violations",
                 "homogeneity_violations", "triangle_violations",
                 "worst_homogeneity_error", "worst_triangle_margin", "passed"]


def _dimensions(args: argparse.Namespace) -> List[int]:
    return ensure_valid(validator.validate_int_list(args.n, "n"), "n")


def _count(value: int, field_name: str, minimum: int = 1) -> int:
    return ensure_valid(validator.validate_count(value, field_name, minimum), field_name)


def _spaces(args: argparse.Namespace, stream: str, p: float, seed: int) -> List[PNormedSpace]:
    """--body if given, otherwise --spaces random Gluskin spaces per n."""
    if args.body:
        return [load_space(args.body, resolve_tol(args))]
    count = _count(args.spaces, "spaces")
    return [
        random_gluskin_space(RandomSpaceSpec(n, p, derive_seed(seed, stream, n, k)))
        for n in _dimensions(args) for k in range(count)
    ]


def cmd_volume(args: argparse.Namespace, context: CommandContext) -> int:
    """Volume of the l_p ball (or --body) by Monte Carlo, beside the exact value."""
    seed = require_seed(args)
    samples = _count(args.samples, "samples")
    threads = resolve_threads(args)
    if args.body:
        space, exact = load_space(args.body, resolve_tol(args)), None
    else:
        n = ensure_valid(validator.validate_dimension(args.n), "n")
        p = parse_exponent(args.p, allow_one=True)
        space = PNormedSpace.lp(n, p)
        exact = ball_volume_lp(n, p)

    estimate = volume_mc(space, samples, seed, threads)
    row = {
        "n": space.dim, "p": space.p, "samples": samples, "hits": estimate.hits,
        "mean": estimate.mean, "std_error": estimate.std_error, "exact": exact,
        "upper_bound": volume_upper_bound(space, exact=args.exact_bound),
    }
    parameters = {"n": space.dim, "p": space.p, "samples": samples, "body": args.body,
                  "exact_bound": args.exact_bound}
    return finish_table(args, context, "experiment volume", parameters, VOLUME_COLUMNS, [row])


def cmd_lemma7(args: argparse.Namespace, context: CommandContext) -> int:
    seed = require_seed(args)
    p = parse_exponent(args.p)
    n = ensure_valid(validator.validate_dimension(args.n), "n")
    if args.body:
        space = load_space(args.body, resolve_tol(args))
    else:
        space = random_gluskin_space(RandomSpaceSpec(n, p, derive_seed(seed, "lemma7.space")))
    T = load_map(args.map) if args.map else LinearMap.identity(space.dim)

    report = lemma7_experiment(T, space, args.t, args.trials, seed,
                               volume_samples=_count(args.volume_samples, "volume_samples"),
                               threads=resolve_threads(args))
    row: Dict[str, Any] = report.model_dump(exclude={"volume"})
    row["volume"] = report.volume.mean
    row["volume_std_error"] = report.volume.std_error
    if not report.consistent:
        logger.warning(f"Run {context.run_id}: empirical probability exceeds bound + 3 sigma")
    parameters = {"n": space.dim, "p": space.p, "t": args.t, "trials": args.trials,
                  "volume_samples": args.volume_samples, "body": args.body, "map": args.map}
    return finish_table(args, context, "experiment lemma7", parameters, LEMMA7_COLUMNS, [row])


def cmd_diameter(args: argparse.Namespace, context: CommandContext) -> int:
    seed = require_seed(args)
    p = parse_exponent(args.p)
    envelope_q: Optional[float] = None
    if args.envelope_q is not None:
        envelope_q = parse_exponent(args.envelope_q, allow_one=True, field_name="envelope_q")
    n_values = _dimensions(args)

    rows = diameter_experiment(n_values, p, _count(args.pairs, "pairs"),
                               _count(args.budget, "budget"), seed,
                               restarts=_count(args.restarts, "restarts", minimum=0),
                               envelope_q=envelope_q,
                               envelope_samples=_count(args.envelope_samples, "envelope_samples"),
                               threads=resolve_threads(args))
    parameters = {"n": n_values, "p": p, "pairs": args.pairs, "budget": args.budget,
                  "restarts": args.restarts, "envelope_q": envelope_q,
                  "envelope_samples": args.envelope_samples}
    return finish_table(args, context, "experiment diameter", parameters,
                        ScalingRow.CSV_COLUMNS, [row.model_dump() for row in rows])


def cmd_envelope(args: argparse.Namespace, context: CommandContext) -> int:
    seed = require_seed(args)
    p = parse_exponent(args.p, allow_one=True)
    q = parse_exponent(args.q, allow_one=True, field_name="q")
    samples = _count(args.samples, "samples")
    rows = []
    for k, space in enumerate(_spaces(args, "envelope.space", p, seed)):
        report = envelope_sandwich_check(space, q, samples, derive_seed(seed, "envelope", k),
                                         threads=resolve_threads(args))
        rows.append({"space": k, **report.model_dump()})
    parameters = {"n": args.n, "p": p, "q": q, "spaces": args.spaces, "samples": samples,
                  "body": args.body}
    return finish_table(args, context, "experiment envelope", parameters, ENVELOPE_COLUMNS, rows)


def cmd_axioms(args: argparse.Namespace, context: CommandContext) -> int:
    seed = require_seed(args)
    p = parse_exponent(args.p, allow_one=True)
    samples = _count(args.samples, "samples")
    rows = []
    for k, space in enumerate(_spaces(args, "axioms.space", p, seed)):
        report = check_pnorm_axioms(space, samples, derive_seed(seed, "axioms", k),
                                    threads=resolve_threads(args))
        rows.append({"n": space.dim, "space": k, "passed": report.passed, **report.model_dump()})
    parameters = {"n": args.n, "p": p, "spaces": args.spaces, "samples": samples,
                  "body": args.body}
    return finish_table(args, context, "experiment axioms", parameters, AXIOM_COLUMNS, rows)


def register(subparsers, common: argparse.ArgumentParser) -> None:
    experiment = subparsers.add_parser("experiment", help="Monte Carlo experiments writing tables")
    kinds = experiment.add_subparsers(dest="experiment", required=True, metavar="EXPERIMENT")

    parser = kinds.add_parser("volume", parents=[common],
                              help="Volume of the l_p^n ball or of --body by rejection sampling")
    parser.add_argument("--n", type=int, default=2)
    parser.add_argument("--p", type=float, default=0.5)
    parser.add_argument("--body", default=None, help="Body file; overrides --n/--p")
    parser.add_argument("--samples", type=int, default=1_000_000)
    parser.add_argument("--exact-bound", action="store_true",
                        help="Sum subset determinants instead of using Hadamard's bound")
    add_output_arguments(parser)
    parser.set_defaults(func=cmd_volume)

    parser = kinds.add_parser("lemma7", parents=[common],
                              help="Probability that T maps n sphere points into a small body")
    parser.add_argument("--n", type=int, default=2)
    parser.add_argument("--p", type=float, default=0.5)
    parser.add_argument("--t", type=float, required=True, help="Scale t > 0")
    parser.add_argument("--trials", type=int, default=10_000)
    parser.add_argument("--volume-samples", type=int, default=100_000)
    parser.add_argument("--body", default=None,
                        help="Fixed body Q_p(A'); default a Gluskin space drawn from the seed")
    parser.add_argument("--map", default=None, help="Map file T; default the identity")
    add_output_arguments(parser)
    parser.set_defaults(func=cmd_lemma7)

    parser = kinds.add_parser("diameter", parents=[common],
                              help="Distance estimates between random Gluskin spaces")
    parser.add_argument("--n", default="2,3", help="Comma separated dimensions")
    parser.add_argument("--p", type=float, default=0.5)
    parser.add_argument("--pairs", type=int, default=2)
    parser.add_argument("--budget", type=int, default=2000)
    parser.add_argument("--restarts", type=int, default=4)
    parser.add_argument("--envelope-q", type=float, default=None,
                        help="Also estimate the distance between the q-envelopes")
    parser.add_argument("--envelope-samples", type=int, default=1000)
    add_output_arguments(parser)
    parser.set_defaults(func=cmd_diameter)

    parser = kinds.add_parser("envelope", parents=[common],
                              help="Check the q-envelope sandwich on random vectors")
    parser.add_argument("--n", default="2", help="Comma separated dimensions")
    parser.add_argument("--p", type=float, default=0.5)
    parser.add_argument("--q", type=float, default=1.0)
    parser.add_argument("--spaces", type=int, default=1, help="Random spaces per dimension")
    parser.add_argument("--body", default=None, help="Body file instead of random spaces")
    parser.add_argument("--samples", type=int, default=1000)
    add_output_arguments(parser)
    parser.set_defaults(func=cmd_envelope)

    parser = kinds.add_parser("axioms", parents=[common],
                              help="Sample the p-norm axioms")
    parser.add_argument("--n", default="2", help="Comma separated dimensions")
    parser.add_argument("--p", type=float, default=0.5)
    parser.add_argument("--spaces", type=int, default=1, help="Random spaces per dimension")
    parser.add_argument("--body", default=None, help="Body file instead of random spaces")
    parser.add_argument("--samples", type=int, default=1000)
    add_output_arguments(parser)
    parser.set_defaults(func=cmd_axioms)
