"""
Exact gauge of finitely generated symmetric p-bodies by subset enumeration.

For x in R^n the gauge satisfies ||x||^p = min sum_i |c_i|^p over all
representations x = sum_i c_i g_i by generators, and the minimum is attained on
n linearly independent generators (see docs/DERIVATIONS.md). The oracle
therefore precomputes the inverse of every invertible n x n matrix of
generators and evaluates x against all of them at once. Signs are carried by
the coefficients, which is the same as enumerating signed subsets.
"""
import math
import logging
from itertools import combinations
from typing import List, Optional, Tuple, Union

import numpy as np

from pconvex.config import get_settings
from pconvex.core.types import PBody, PCombination, Term, as_vector
from pconvex.exceptions import BudgetExceededError, InputValidationError, NumericalFailureError
from pconvex.utils.cache_manager import get_cache_manager
from pconvex.utils.parallel import map_ordered

logger = logging.getLogger(__name__)

# Entries of the (points x subsets x n) coefficient block evaluated at once
BLOCK_ENTRIES = 1 << 21
POINT_CHUNK = 4096
# Coefficients within this many ulps of sum_j |inv_ij x_j| are rounding noise
NOISE_ULPS = 64
NOISE_FACTOR = NOISE_ULPS * float(np.finfo(np.float64).eps)


class GaugeOracle:
    """
    Precomputed inverses of all invertible n-subsets of a body's generators.

    Instances are immutable once built and are shared through the cache
    manager, keyed by the body's exponent, generators and tolerance.
    """

    def __init__(self, body: PBody, tol: float, budget: int):
        points = body.generators.points
        m, n = points.shape
        required = math.comb(2 * m, n)
        if required > budget:
            raise BudgetExceededError("gauge subset enumeration", required, budget)

        self.dim = n
        self.p = body.p.value
        self.tol = tol
        self.generator_count = m

        subsets = np.array(list(combinations(range(m), n)), dtype=np.int64).reshape(-1, n)
        matrices = np.transpose(points[subsets], (0, 2, 1))
        singular = np.linalg.svd(matrices, compute_uv=False)
        independent = singular[:, -1] > tol * singular[:, 0]
        if not np.any(independent):
            raise NumericalFailureError("Generators contain no invertible n-subset",
                                        details={"generators": m, "dim": n})

        self.subsets = subsets[independent]
        self.inverses = np.linalg.inv(matrices[independent])
        self.abs_inverses = np.abs(self.inverses)
        self.subsets.setflags(write=False)
        self.inverses.setflags(write=False)
        self.abs_inverses.setflags(write=False)
        logger.debug(f"Built gauge oracle: {len(self.subsets)} of {len(subsets)} subsets invertible")

    @property
    def subset_count(self) -> int:
        return int(self.subsets.shape[0])

    def _snapped_coefficients(self, start: int, stop: int, points: np.ndarray) -> np.ndarray:
        """
        |inv_k x| for subsets start..stop-1. Entries inside the rounding error
        of the product are zeroed; genuinely small coefficients are kept.
        """
        coeffs = np.einsum("kij,nj->nki", self.inverses[start:stop], points)
        noise = NOISE_FACTOR * np.einsum("kij,nj->nki", self.abs_inverses[start:stop], np.abs(points))
        magnitude = np.abs(coeffs)
        magnitude[magnitude <= noise] = 0.0
        return magnitude

    def evaluate(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Minimum weight and best subset for every row of points.

        Subsets are scanned in blocks; a later block only wins with a strictly
        smaller weight, so ties resolve to the lexicographically first subset.

        Args:
            points: Array of shape (N, n)

        Returns:
            (weights, subset_positions): arrays of length N
        """
        count = points.shape[0]
        best_weight = np.full(count, np.inf)
        best_subset = np.zeros(count, dtype=np.int64)
        block = max(1, BLOCK_ENTRIES // max(1, count * self.dim))
        for start in range(0, self.subset_count, block):
            magnitude = self._snapped_coefficients(start, start + block, points)
            weights = np.sum(magnitude ** self.p, axis=2)
            local = np.argmin(weights, axis=1)
            local_weight = weights[np.arange(count), local]
            better = local_weight < best_weight
            best_weight[better] = local_weight[better]
            best_subset[better] = local[better] + start
        return best_weight, best_subset

    def witness(self, x: np.ndarray, subset_position: int) -> PCombination:
        """Signed combination realising the weight of x on the given subset."""
        coeffs = np.einsum("ij,j->i", self.inverses[subset_position], x)
        noise = NOISE_FACTOR * np.einsum("ij,j->i", self.abs_inverses[subset_position], np.abs(x))
        terms = []
        for index, c, floor in zip(self.subsets[subset_position], coeffs, noise):
            if abs(c) <= floor:
                continue
            terms.append(Term(int(index), 1 if c >= 0.0 else -1, float(abs(c))))
        return PCombination(tuple(terms), self.dim)


def get_gauge_oracle(body: PBody, tol: Optional[float] = None,
                     budget: Optional[int] = None) -> GaugeOracle:
    """
    Get the (cached) gauge oracle of a body.

    Args:
        body: The p-body
        tol: Rank tolerance, defaults to the configured one
        budget: Limit on C(2m, n), defaults to the configured one

    Returns:
        GaugeOracle instance

    Raises:
        BudgetExceededError: If C(2m, n) exceeds the budget
    """
    settings = get_settings()
    tol = settings.tol if tol is None else float(tol)
    budget = settings.gauge_budget if budget is None else int(budget)
    if not tol > 0.0:
        raise InputValidationError(f"tol must be positive, got {tol}", field="tol",
                                   error_code="INVALID_TOLERANCE")
    # Checked before the lookup: cached oracles may have been built under a larger budget
    m, n = body.generators.points.shape
    required = math.comb(2 * m, n)
    if required > budget:
        raise BudgetExceededError("gauge subset enumeration", required, budget)

    cache_manager = get_cache_manager()
    key = cache_manager.generate_body_key(body.p.value, body.generators.points, tol)

    def build() -> GaugeOracle:
        oracle = GaugeOracle(body, tol, budget)
        usage = cache_manager.get_memory_usage_estimate()
        logger.debug(f"New oracle with {oracle.subset_count} subsets; cache already holds "
                     f"{usage['entry_count']} oracles, about {usage['total_estimated_mb']}MB")
        return oracle

    return cache_manager.get_or_create(key, build)


def gauge_bruteforce(x: Union[np.ndarray, List[float]], body: PBody,
                     tol: Optional[float] = None) -> Tuple[float, PCombination]:
    """
    Gauge of x with respect to body, and a witness combination.

    Args:
        x: Vector of dimension body.dim
        body: The p-body
        tol: Rank tolerance

    Returns:
        (||x||, witness) where the witness has at most n terms on independent
        generators, value x and weight ||x||^p; (0.0, empty) for x = 0

    Raises:
        BudgetExceededError: If the enumeration budget is exceeded
    """
    x = as_vector(x, body.dim, field_name="x")
    oracle = get_gauge_oracle(body, tol)
    if not np.any(x):
        return 0.0, PCombination.empty(body.dim)

    weights, subsets = oracle.evaluate(x.reshape(1, -1))
    weight = float(weights[0])
    if not math.isfinite(weight):
        raise NumericalFailureError("x is outside the span of the generators")
    return weight ** (1.0 / oracle.p), oracle.witness(x, int(subsets[0]))


def gauge_many(points: Union[np.ndarray, List[List[float]]], body: PBody,
               tol: Optional[float] = None, threads: Optional[int] = None) -> np.ndarray:
    """
    Gauges of many points at once.

    Points are cut into fixed-size chunks that may run on several threads;
    chunk boundaries do not depend on the thread count, so the result does not
    either.

    Args:
        points: Array of shape (N, n)
        body: The p-body
        tol: Rank tolerance
        threads: Worker threads, defaults to the configured value

    Returns:
        Array of N gauges
    """
    array = np.asarray(points, dtype=np.float64)
    if array.ndim != 2 or array.shape[1] != body.dim:
        raise InputValidationError(f"points must have shape (N, {body.dim})", field="points",
                                   error_code="BAD_SHAPE")
    if not np.all(np.isfinite(array)):
        raise InputValidationError("points have non-finite entries", field="points",
                                   error_code="NON_FINITE")
    oracle = get_gauge_oracle(body, tol)
    if array.shape[0] == 0:
        return np.zeros(0)

    chunks = [array[start:start + POINT_CHUNK] for start in range(0, array.shape[0], POINT_CHUNK)]
    results = map_ordered(lambda chunk: oracle.evaluate(chunk)[0], chunks, threads)
    return np.concatenate(results) ** (1.0 / oracle.p)


def membership(x: Union[np.ndarray, List[float]], body: PBody,
               tol: Optional[float] = None) -> Tuple[bool, Optional[PCombination]]:
    """
    Decide whether x lies in the body.

    Returns:
        (True, witness) when gauge(x) <= 1 + tol, otherwise (False, None)
    """
    tol = get_settings().tol if tol is None else float(tol)
    value, witness = gauge_bruteforce(x, body, tol)
    if value <= 1.0 + tol:
        return True, witness
    return False, None
