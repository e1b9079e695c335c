"""
Quasi-norm layer over p-bodies: gauges as norms, axiom checks, operator norms
and q-envelopes.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from pconvex.core.types import GeneratorSet, LinearMap, PBody, PExponent, as_exponent
from pconvex.exceptions import DimensionMismatchError, ExponentValidationError
from pconvex.models.reports import AxiomReport, SandwichReport
from pconvex.services.gauge_service import gauge_bruteforce, gauge_many
from pconvex.utils.rng import make_generator
from pconvex.utils.validators import InputValidator, ensure_valid

logger = logging.getLogger(__name__)

AXIOM_TOL = 1e-9
HOMOGENEITY_SCALE = 10.0

validator = InputValidator()


@dataclass(frozen=True, eq=False)
class PNormedSpace:
    """(R^n, gauge of body): the body is the unit ball."""

    body: PBody
    name: Optional[str] = None

    @property
    def dim(self) -> int:
        return self.body.dim

    @property
    def p(self) -> float:
        return self.body.p.value

    @property
    def generators(self) -> GeneratorSet:
        return self.body.generators

    @classmethod
    def lp(cls, n: int, p: Union[float, PExponent]) -> "PNormedSpace":
        p = as_exponent(p)
        return cls(PBody.lp_ball(n, p), name=f"l_{p.value:g}^{n}")

    @classmethod
    def from_generators(cls, points, p: Union[float, PExponent],
                        name: Optional[str] = None) -> "PNormedSpace":
        return cls(PBody(GeneratorSet(np.asarray(points, dtype=np.float64)), as_exponent(p)), name)

    def transformed(self, T: LinearMap) -> "PNormedSpace":
        """The space whose unit ball is T(B_X)."""
        return PNormedSpace(PBody(self.generators.transformed(T), self.body.p, self.body.tol),
                            name=None if self.name is None else f"T({self.name})")


def _check_same_dim(first: PNormedSpace, second: PNormedSpace, field: str = "space") -> None:
    if first.dim != second.dim:
        raise DimensionMismatchError(first.dim, second.dim, field=field)


def gauge(x, space: PNormedSpace) -> float:
    """
    Norm of x in the space.

    Raises:
        BudgetExceededError: If the subset enumeration exceeds the gauge budget
    """
    value, _ = gauge_bruteforce(x, space.body)
    return value


def check_pnorm_axioms(space: PNormedSpace, samples: int, seed: int,
                       threads: Optional[int] = None) -> AxiomReport:
    """
    Sample the p-norm axioms on random vectors.

    Draws standard-normal pairs (x, y) and scalars a uniform in [-10, 10]
    (zero redrawn), then checks positivity, |a| homogeneity and the
    p-triangle inequality with relative tolerance 1e-9. Violations are
    counted, never raised.

    Args:
        space: Space under test
        samples: Number of (x, y, a) triples, >= 1
        seed: Seed of the "norms.axioms" stream
        threads: Worker threads for the batched gauges

    Returns:
        AxiomReport with violation counts and worst margins
    """
    ensure_valid(validator.validate_count(samples, "samples"), "samples")
    ensure_valid(validator.validate_seed(seed), "seed")

    rng = make_generator(seed, "norms.axioms")
    n = space.dim
    x = rng.standard_normal((samples, n))
    y = rng.standard_normal((samples, n))
    a = rng.uniform(-HOMOGENEITY_SCALE, HOMOGENEITY_SCALE, samples)
    while np.any(a == 0.0):
        zero = a == 0.0
        a[zero] = rng.uniform(-HOMOGENEITY_SCALE, HOMOGENEITY_SCALE, int(zero.sum()))

    stacked = np.vstack([x, y, a[:, None] * x, x + y])
    values = gauge_many(stacked, space.body, threads=threads)
    gx, gy, gax, gxy = np.split(values, 4)
    p = space.p

    positivity = int(np.sum(~(gx > 0.0))) + int(np.sum(~(gy > 0.0)))
    if gauge(np.zeros(n), space) != 0.0:
        positivity += 1

    expected = np.abs(a) * gx
    homogeneity_error = np.abs(gax - expected) / expected
    homogeneity = int(np.sum(homogeneity_error > AXIOM_TOL))

    rhs = gx ** p + gy ** p
    margin = (gxy ** p - rhs) / rhs
    triangle = int(np.sum(margin > AXIOM_TOL))

    report = AxiomReport(
        samples=samples, seed=seed, p=p,
        positivity_violations=positivity,
        homogeneity_violations=homogeneity,
        triangle_violations=triangle,
        worst_homogeneity_error=float(np.max(homogeneity_error)),
        worst_triangle_margin=float(np.max(margin)),
    )
    if not report.passed:
        logger.warning(f"p-norm axioms violated on {space.name or 'space'}: "
                       f"{report.violations} of {samples} samples")
    else:
        logger.debug(f"Axioms hold on {samples} samples; worst triangle margin "
                     f"{report.worst_triangle_margin:.3e}")
    return report


def operator_norm(T: LinearMap, from_space: PNormedSpace, to_space: PNormedSpace,
                  threads: Optional[int] = None) -> float:
    """
    Norm of T as a map from_space -> to_space.

    Every point of the unit ball of from_space is sum lam_i g_i with
    sum lam_i^p <= 1, so ||Tx||^p <= max_i ||T g_i||^p: the maximum over the
    generators is attained and is the norm. Signs are irrelevant by symmetry.

    Raises:
        DimensionMismatchError: If T, from_space and to_space disagree
        BudgetExceededError: If the target gauge exceeds its budget
    """
    _check_same_dim(from_space, to_space)
    if T.dim != from_space.dim:
        raise DimensionMismatchError(from_space.dim, T.dim, field="map")
    images = T.apply(from_space.generators.points)
    return float(np.max(gauge_many(images, to_space.body, threads=threads)))


def q_envelope(space: PNormedSpace, q: Union[float, PExponent]) -> PNormedSpace:
    """
    The q-envelope X^q for p <= q <= 1: same generators, exponent q.

    q = 1 gives the Banach envelope. q = p returns an equal space.

    Raises:
        ExponentValidationError: If q < p or q > 1
    """
    q = as_exponent(q)
    if q.value < space.p:
        raise ExponentValidationError(
            f"Envelope exponent q={q.value} must be at least p={space.p}", q.value,
            details={"p": space.p})
    name = None if space.name is None else f"{space.name}^({q.value:g})"
    return PNormedSpace(space.body.with_exponent(q), name=name)


def envelope_bound(space: PNormedSpace, q: Union[float, PExponent]) -> float:
    """n^(1/p - 1/q): upper bound on d(X, X^q)."""
    q = as_exponent(q)
    return space.dim ** (1.0 / space.p - 1.0 / q.value)


def banach_envelope_distance_bound(space: PNormedSpace) -> float:
    """n^(1/p - 1): upper bound on d(X, X^b)."""
    return envelope_bound(space, 1.0)


def peck_diameter_bound(n: int, p: Union[float, PExponent]) -> float:
    """n^(2/p - 1): upper bound on the diameter of the n-dimensional p-normed spaces."""
    p = as_exponent(p)
    return n ** (2.0 / p.value - 1.0)


def envelope_sandwich_check(space: PNormedSpace, q: Union[float, PExponent], samples: int,
                            seed: int, threads: Optional[int] = None) -> SandwichReport:
    """
    Check ||x||_{X^q} <= ||x||_X <= n^(1/p-1/q) ||x||_{X^q} on random x.

    Args:
        space: The space X
        q: Envelope exponent, p <= q <= 1
        samples: Number of standard-normal test vectors
        seed: Seed of the "norms.envelope" stream
        threads: Worker threads for the batched gauges

    Returns:
        SandwichReport; max_ratio is an empirical lower bound for d(X, X^q)
    """
    ensure_valid(validator.validate_count(samples, "samples"), "samples")
    ensure_valid(validator.validate_seed(seed), "seed")
    envelope = q_envelope(space, q)
    bound = envelope_bound(space, envelope.body.p)

    x = make_generator(seed, "norms.envelope").standard_normal((samples, space.dim))
    own = gauge_many(x, space.body, threads=threads)
    enveloped = gauge_many(x, envelope.body, threads=threads)
    ratio = own / enveloped

    report = SandwichReport(
        samples=samples, seed=seed, n=space.dim, p=space.p, q=envelope.p, bound=bound,
        max_ratio=float(np.max(ratio)),
        lower_violations=int(np.sum(enveloped > own * (1.0 + AXIOM_TOL))),
        upper_violations=int(np.sum(own > bound * enveloped * (1.0 + AXIOM_TOL))),
    )
    if report.violations:
        logger.warning(f"Envelope sandwich violated {report.violations} times "
                       f"(p={space.p}, q={envelope.p})")
    return report

