"""
Random Gluskin-type spaces, volumes and the Monte Carlo experiments on them.

A Gluskin space of dimension n is Q_p(A) = p-conv{+-e_i, +-P_i} with P_1..P_n
independent uniform points of the Euclidean sphere. Monte Carlo work is cut
into fixed-size chunks; chunk c reads block c of its named random stream, so
results do not depend on how chunks are spread over threads.
"""

import math
import logging
from dataclasses import dataclass
from itertools import combinations
from typing import List, Optional, Sequence, Union

import numpy as np
from scipy.special import gammaln

from pconvex.config import get_settings
from pconvex.core.types import GeneratorSet, LinearMap, PBody, PExponent, as_exponent
from pconvex.exceptions import BudgetExceededError, DimensionMismatchError, InputValidationError
from pconvex.models.reports import Lemma7Report, ScalingRow, VolumeEstimate
from pconvex.services.distance_service import distance_estimate
from pconvex.services.gauge_service import get_gauge_oracle
from pconvex.services.norm_service import (
    PNormedSpace,
    envelope_sandwich_check,
    peck_diameter_bound,
    q_envelope
)
from pconvex.utils.parallel import map_ordered
from pconvex.utils.rng import derive_seed, make_generator
from pconvex.utils.validators import InputValidator, ensure_valid

logger = logging.getLogger(__name__)

MC_CHUNK = 65536
TRIAL_CHUNK = 4096
PARALLEL_TOL = 1e-12
NORM_SLACK = 1e-12
DET_CHUNK = 4096

validator = InputValidator()


@dataclass(frozen=True)
class RandomSpaceSpec:
    n: int
    p: Union[float, PExponent]
    seed: int

    def __post_init__(self):
        ensure_valid(validator.validate_dimension(self.n), "n")
        ensure_valid(validator.validate_seed(self.seed), "seed")
        object.__setattr__(self, "p", as_exponent(self.p))


def sample_sphere(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform point of S^(n-1): a normalized standard-normal vector (zero redrawn)."""
    while True:
        v = rng.standard_normal(n)
        norm = float(np.linalg.norm(v))
        if norm > 0.0:
            return v / norm


def _sample_spheres(shape: tuple, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(shape)
    norms = np.linalg.norm(v, axis=-1, keepdims=True)
    # A zero draw has probability zero; map it to the first axis
    zero = norms[..., 0] == 0.0
    if np.any(zero):
        v[zero] = np.eye(shape[-1])[0]
        norms[zero] = 1.0
    return v / norms


def random_gluskin_space(spec: RandomSpaceSpec) -> PNormedSpace:
    """
    Draw Q_p(A): generators e_1..e_n followed by n sphere points.

    A sphere point numerically parallel to an earlier generator is redrawn
    (never happens in practice; skipped for n = 1 where every point is +-e_1).
    """
    n = spec.n
    rng = make_generator(spec.seed, "gluskin.space")
    rows = [row for row in np.eye(n)]
    for _ in range(n):
        while True:
            point = sample_sphere(n, rng)
            cosines = np.abs(np.array(rows) @ point)
            if n == 1 or np.all(cosines < 1.0 - PARALLEL_TOL):
                break
            logger.debug("Redrawing sphere point parallel to an existing generator")
        rows.append(point)
    name = f"gluskin(n={n}, p={spec.p.value:g}, seed={spec.seed})"
    return PNormedSpace(PBody(GeneratorSet(np.array(rows)), spec.p), name=name)


def ball_volume_lp(n: int, p: Union[float, PExponent]) -> float:
    """|B_{l_p^n}| = 2^n Gamma(1 + 1/p)^n / Gamma(1 + n/p), evaluated in log space."""
    p = as_exponent(p).value
    ensure_valid(validator.validate_count(n, "n"), "n")
    return math.exp(n * math.log(2.0) + n * gammaln(1.0 + 1.0 / p) - gammaln(1.0 + n / p))


def euclidean_ball_volume(n: int) -> float:
    """|B_{l_2^n}| = pi^(n/2) / Gamma(n/2 + 1)."""
    ensure_valid(validator.validate_count(n, "n"), "n")
    return math.exp(0.5 * n * math.log(math.pi) - gammaln(0.5 * n + 1.0))


def _check_inside_euclidean_ball(space: PNormedSpace) -> None:
    norms = np.linalg.norm(space.generators.points, axis=1)
    if np.any(norms > 1.0 + NORM_SLACK):
        raise InputValidationError(
            "Generators must have Euclidean norm at most 1",
            field="generators", details={"max_norm": float(np.max(norms))},
            error_code="GENERATOR_OUTSIDE_BALL")


def _uniform_ball_points(count: int, n: int, rng: np.random.Generator) -> np.ndarray:
    directions = _sample_spheres((count, n), rng)
    radii = rng.random(count) ** (1.0 / n)
    return directions * radii[:, None]


def volume_mc(space: PNormedSpace, samples: int, seed: int,
              threads: Optional[int] = None) -> VolumeEstimate:
    """
    Rejection-sampling estimate of the volume of the unit ball of space.

    Points are uniform in the Euclidean unit ball, which contains the body
    when every generator has Euclidean norm <= 1.

    Args:
        space: Space whose unit ball is measured
        samples: Number of points, >= 1
        seed: Seed of the "volume_mc" stream
        threads: Worker threads over chunks

    Returns:
        VolumeEstimate with binomial standard error

    Raises:
        InputValidationError: If a generator lies outside the Euclidean ball
    """
    samples = ensure_valid(validator.validate_count(samples, "samples"), "samples")
    seed = ensure_valid(validator.validate_seed(seed), "seed")
    _check_inside_euclidean_ball(space)
    oracle = get_gauge_oracle(space.body)
    n = space.dim

    def count_hits(chunk: int) -> int:
        size = min(MC_CHUNK, samples - chunk * MC_CHUNK)
        points = _uniform_ball_points(size, n, make_generator(seed, "volume_mc", chunk))
        weights, _ = oracle.evaluate(points)
        return int(np.count_nonzero(weights <= 1.0))

    chunks = range((samples + MC_CHUNK - 1) // MC_CHUNK)
    hits = sum(map_ordered(count_hits, chunks, threads))
    fraction = hits / samples
    ball = euclidean_ball_volume(n)
    estimate = VolumeEstimate(
        mean=fraction * ball,
        std_error=ball * math.sqrt(fraction * (1.0 - fraction) / samples),
        samples=samples,
        hits=hits,
    )
    logger.debug(f"Volume of {space.name or 'body'}: {estimate.mean:.6g} "
                 f"+- {estimate.std_error:.2g} ({hits}/{samples} hits)")
    return estimate


def _subset_determinant_sum(points: np.ndarray) -> float:
    m, n = points.shape
    required = math.comb(m, n)
    budget = get_settings().gauge_budget
    if required > budget:
        raise BudgetExceededError("exact volume bound subset enumeration", required, budget)
    total = 0.0
    subsets = combinations(range(m), n)
    while True:
        block = np.array([s for _, s in zip(range(DET_CHUNK), subsets)], dtype=np.int64)
        if block.size == 0:
            return total
        total += float(np.sum(np.abs(np.linalg.det(points[block]))))


def volume_upper_bound(space: PNormedSpace, exact: bool = False) -> float:
    """
    Upper bound on the volume of the unit ball via the simplex union.

    The body is the union, over n-subsets of the 2m signed generators, of the
    images of the positive part of B_{l_p^n}, each of volume
    |det| |B_{l_p^n}| / 2^n. By default every |det| is replaced by Hadamard's
    bound 1, giving C(2m, n) |B_{l_p^n}| / 2^n. With exact=True the
    determinants are summed; signed choices of one unsigned subset share
    |det|, so the sum is over unsigned subsets times |B_{l_p^n}|.

    Raises:
        InputValidationError: If a generator is longer than 1 (default mode)
        BudgetExceededError: If the exact enumeration exceeds the gauge budget
    """
    m, n = space.generators.points.shape
    lp_volume = ball_volume_lp(n, space.p)
    if exact:
        return _subset_determinant_sum(space.generators.points) * lp_volume
    _check_inside_euclidean_ball(space)
    return math.comb(2 * m, n) * lp_volume / 2.0 ** n


def lemma7_experiment(T: LinearMap, fixed_space: PNormedSpace, t: float, trials: int, seed: int,
                      volume_samples: int = 100_000,
                      threads: Optional[int] = None) -> Lemma7Report:
    """
    Estimate P{ ||T P_i|| <= 2^(1/p) t in fixed_space for all i } over random A.

    Each trial draws n fresh sphere points. The probability is compared with
    (2^(1/p) t)^(n^2) (|Q| / |B_2|)^n, which bounds it for every T with
    |det T| = 1; T is rescaled to that first. |Q| is itself a Monte Carlo
    estimate drawn from a derived seed.

    Args:
        T: Linear map, normalized to |det| = 1
        fixed_space: The body Q_p(A')
        t: Scale, > 0
        trials: Number of random tuples, >= 1
        seed: Experiment seed
        volume_samples: Samples for the volume estimate
        threads: Worker threads

    Returns:
        Lemma7Report; `consistent` is true when the bound is vacuous (>= 1) or
        the empirical probability is at most bound + 3 standard errors
    """
    if isinstance(t, bool) or not isinstance(t, (int, float)) or not math.isfinite(t) or t <= 0.0:
        raise InputValidationError(f"t must be a positive number, got {t}", field="t",
                                   error_code="INVALID_SCALE")
    trials = ensure_valid(validator.validate_count(trials, "trials"), "trials")
    seed = ensure_valid(validator.validate_seed(seed), "seed")
    n, p = fixed_space.dim, fixed_space.p
    if T.dim != n:
        raise DimensionMismatchError(n, T.dim, field="map")

    T = T.normalized()
    threshold = 2.0 ** (1.0 / p) * t
    limit = threshold ** p
    oracle = get_gauge_oracle(fixed_space.body)

    def count_hits(chunk: int) -> int:
        size = min(TRIAL_CHUNK, trials - chunk * TRIAL_CHUNK)
        points = _sample_spheres((size, n, n), make_generator(seed, "lemma7.trials", chunk))
        weights, _ = oracle.evaluate(T.apply(points.reshape(size * n, n)))
        return int(np.count_nonzero(np.all(weights.reshape(size, n) <= limit, axis=1)))

    chunks = range((trials + TRIAL_CHUNK - 1) // TRIAL_CHUNK)
    hits = sum(map_ordered(count_hits, chunks, threads))
    probability = hits / trials
    std_error = math.sqrt(probability * (1.0 - probability) / trials)

    volume = volume_mc(fixed_space, volume_samples, derive_seed(seed, "lemma7.volume"), threads)
    ball = euclidean_ball_volume(n)
    bound = threshold ** (n * n) * (volume.mean / ball) ** n
    vacuous = bound >= 1.0
    if vacuous:
        logger.warning(f"Bound {bound:.4g} is vacuous at t={t}; consistency check skipped")

    return Lemma7Report(
        n=n, p=p, t=float(t), threshold=threshold, trials=trials, hits=hits,
        empirical_probability=probability, std_error=std_error,
        volume=volume, ball_volume=ball, bound=bound, vacuous=vacuous,
        consistent=vacuous or probability <= bound + 3.0 * std_error,
    )


def diameter_experiment(n_values: Sequence[int], p: Union[float, PExponent], pairs_per_n: int,
                        budget: int, seed: int, restarts: int = 4,
                        envelope_q: Optional[float] = None, envelope_samples: int = 1000,
                        threads: Optional[int] = None) -> List[ScalingRow]:
    """
    Distance estimates between pairs of random Gluskin spaces.

    For every n, pairs_per_n independent pairs (A, A') are drawn and
    d(Q_p(A), Q_p(A')) is estimated from above. Rows carry the reference
    n^(2/p-1) and, for both spaces, the largest observed ratio
    ||x||_X / ||x||_{X^q} (q = envelope_q, or 1 when not given). With
    envelope_q set, rows also carry the distance estimate between the two
    q-envelopes and its reference n^(2/q-1). Every seed is derived from
    (seed, n, pair), so rows do not depend on the other rows requested.

    Raises:
        BudgetExceededError: If an n is too large for the gauge budget
    """
    p = as_exponent(p)
    pairs_per_n = ensure_valid(validator.validate_count(pairs_per_n, "pairs"), "pairs")
    seed = ensure_valid(validator.validate_seed(seed), "seed")
    if envelope_q is not None:
        envelope_q = as_exponent(envelope_q).value
    ratio_q = 1.0 if envelope_q is None else envelope_q

    rows = []
    for n in n_values:
        ensure_valid(validator.validate_dimension(n), "n")
        for pair in range(pairs_per_n):
            X = random_gluskin_space(RandomSpaceSpec(n, p, derive_seed(seed, "diameter", n, pair, "A")))
            Y = random_gluskin_space(RandomSpaceSpec(n, p, derive_seed(seed, "diameter", n, pair, "B")))
            estimate = distance_estimate(X, Y, budget, restarts,
                                         derive_seed(seed, "diameter", n, pair, "distance"),
                                         threads=threads)
            ratio_seed = derive_seed(seed, "diameter", n, pair, "envelope")
            row = ScalingRow(
                n=n, p=p.value, pair=pair,
                distance_upper=estimate.upper_bound,
                reference=peck_diameter_bound(n, p),
                envelope_ratio_x=envelope_sandwich_check(X, ratio_q, envelope_samples,
                                                         ratio_seed, threads).max_ratio,
                envelope_ratio_y=envelope_sandwich_check(Y, ratio_q, envelope_samples,
                                                         ratio_seed, threads).max_ratio,
            )
            if envelope_q is not None:
                enveloped = distance_estimate(q_envelope(X, envelope_q), q_envelope(Y, envelope_q),
                                              budget, restarts,
                                              derive_seed(seed, "diameter", n, pair, "envelope_distance"),
                                              threads=threads)
                row.envelope_q = envelope_q
                row.envelope_distance_upper = enveloped.upper_bound
                row.envelope_reference = peck_diameter_bound(n, envelope_q)
            logger.info(f"n={n} pair={pair}: distance <= {row.distance_upper:.6g} "
                        f"(reference {row.reference:.6g})")
            rows.append(row)
    return rows
