"""
Upper estimates of the Banach-Mazur distance between two p-normed spaces.

The objective f(T) = log ||T: X -> Y|| + log ||T^-1: Y -> X|| is invariant
under scaling of T, so maps are searched in GL(n) and rescaled to |det| = 1
before evaluation. Each start runs a Nelder-Mead search on the n^2 matrix
entries; the best value over all starts is an upper bound on d(X, Y), never a
certified value.
"""

import math
import logging
from dataclasses import dataclass, field
from itertools import permutations
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from pconvex.core.types import LinearMap
from pconvex.exceptions import DimensionMismatchError, NumericalFailureError
from pconvex.services.gauge_service import GaugeOracle, get_gauge_oracle
from pconvex.services.norm_service import PNormedSpace
from pconvex.utils.parallel import map_ordered
from pconvex.utils.rng import make_generator
from pconvex.utils.validators import InputValidator, ensure_valid

logger = logging.getLogger(__name__)

MAX_CONDITION = 1e8
SIMPLEX_TOL = 1e-8
MAX_REDRAWS = 100

validator = InputValidator()


@dataclass(frozen=True)
class DistanceEstimate:
    """Best map found and its distance product, an upper bound on d(X, Y)."""

    upper_bound: float
    best_map: LinearMap
    evaluations: int
    seed: int
    restarts: int
    restart_values: Tuple[float, ...] = field(default_factory=tuple)


class _BudgetSpent(Exception):
    pass


class _CountingObjective:
    """Objective wrapper that stops the search once its share is used up."""

    def __init__(self, X: PNormedSpace, Y: PNormedSpace, limit: int):
        self.n = X.dim
        self.forward = (X.generators.points, get_gauge_oracle(Y.body))
        self.backward = (Y.generators.points, get_gauge_oracle(X.body))
        self.limit = limit
        self.calls = 0
        self.best_value = math.inf
        self.best_params: Optional[np.ndarray] = None

    def __call__(self, params: np.ndarray) -> float:
        if self.calls >= self.limit:
            raise _BudgetSpent()
        self.calls += 1
        value = _objective(LinearMap(params.reshape(self.n, self.n)), self.forward, self.backward)
        if value < self.best_value:
            self.best_value = value
            self.best_params = np.array(params, dtype=np.float64)
        return value


def _opnorm(matrix: np.ndarray, generators: np.ndarray, oracle: GaugeOracle) -> float:
    weights, _ = oracle.evaluate(generators @ matrix.T)
    return float(np.max(weights)) ** (1.0 / oracle.p)


def _objective(T: LinearMap, forward: Tuple[np.ndarray, GaugeOracle],
               backward: Tuple[np.ndarray, GaugeOracle]) -> float:
    cond = T.condition_number()
    if not math.isfinite(cond) or cond > MAX_CONDITION:
        return math.inf
    normalized = T.normalized()
    inverse = normalized.inverse()
    norm = _opnorm(normalized.matrix, *forward)
    inverse_norm = _opnorm(inverse.matrix, *backward)
    return math.log(norm) + math.log(inverse_norm)


def distance_objective(T: LinearMap, X: PNormedSpace, Y: PNormedSpace) -> float:
    """
    log ||T: X -> Y|| + log ||T^-1: Y -> X||.

    Returns:
        The objective value, or inf when cond(T) > 1e8
    """
    if X.dim != Y.dim:
        raise DimensionMismatchError(X.dim, Y.dim, field="space")
    if T.dim != X.dim:
        raise DimensionMismatchError(X.dim, T.dim, field="map")
    return _objective(T, (X.generators.points, get_gauge_oracle(Y.body)),
                      (Y.generators.points, get_gauge_oracle(X.body)))


def _random_start(n: int, seed: int, restart: int) -> LinearMap:
    rng = make_generator(seed, "distance.restart", restart)
    for _ in range(MAX_REDRAWS):
        candidate = LinearMap(rng.standard_normal((n, n)))
        if candidate.condition_number() <= MAX_CONDITION:
            return candidate.normalized()
    raise NumericalFailureError("Could not draw a well-conditioned start map",
                                details={"restart": restart, "attempts": MAX_REDRAWS})


def _start_maps(n: int, restarts: int, seed: int,
                initial_maps: Sequence[LinearMap]) -> List[LinearMap]:
    starts = [LinearMap(np.eye(n)[list(order)]) for order in permutations(range(n))]
    for T in initial_maps:
        if T.dim != n:
            raise DimensionMismatchError(n, T.dim, field="initial_maps")
        starts.append(T)
    starts.extend(_random_start(n, seed, r) for r in range(restarts))
    return starts


def _search(start: LinearMap, X: PNormedSpace, Y: PNormedSpace,
            share: int) -> Tuple[float, Optional[np.ndarray], int]:
    objective = _CountingObjective(X, Y, share)
    try:
        minimize(objective, start.matrix.ravel(), method="Nelder-Mead",
                 options={"xatol": SIMPLEX_TOL, "fatol": SIMPLEX_TOL, "maxfev": share,
                          "adaptive": True})
    except _BudgetSpent:
        pass
    return objective.best_value, objective.best_params, objective.calls


def distance_estimate(X: PNormedSpace, Y: PNormedSpace, budget: int, restarts: int, seed: int,
                      initial_maps: Sequence[LinearMap] = (),
                      threads: Optional[int] = None) -> DistanceEstimate:
    """
    Search for a map T with small ||T||·||T^-1||.

    Starts are the identity and every axis permutation, then initial_maps,
    then `restarts` random maps (standard-normal entries, restart r drawn from
    block r of the "distance.restart" stream). The evaluation budget is split
    evenly over the starts, at least one evaluation each. Starts run on
    worker threads; the minimum is taken in start order, so the result does
    not depend on the thread count.

    Args:
        X: Source space
        Y: Target space, same dimension
        budget: Total objective evaluations, >= 1
        restarts: Number of random starts, >= 0
        seed: Seed for the random starts
        initial_maps: Extra starts, e.g. a known isometry
        threads: Worker threads

    Returns:
        DistanceEstimate with upper_bound >= 1

    Raises:
        NumericalFailureError: If every start stays ill-conditioned
    """
    if X.dim != Y.dim:
        raise DimensionMismatchError(X.dim, Y.dim, field="space")
    budget = ensure_valid(validator.validate_count(budget, "budget"), "budget")
    restarts = ensure_valid(validator.validate_count(restarts, "restarts", minimum=0), "restarts")
    seed = ensure_valid(validator.validate_seed(seed), "seed")

    starts = _start_maps(X.dim, restarts, seed, initial_maps)
    share = max(1, budget // len(starts))
    logger.debug(f"Distance search: {len(starts)} starts, {share} evaluations each")

    results = map_ordered(lambda start: _search(start, X, Y, share), starts, threads)
    values = [value for value, _, _ in results]
    evaluations = sum(calls for _, _, calls in results)

    best = min(range(len(results)), key=lambda i: (values[i], i))
    best_value, best_params, _ = results[best]
    if not math.isfinite(best_value) or best_params is None:
        raise NumericalFailureError("Every candidate map was numerically singular",
                                    details={"starts": len(starts), "evaluations": evaluations})

    best_map = LinearMap(best_params.reshape(X.dim, X.dim)).normalized()
    upper_bound = max(1.0, math.exp(distance_objective(best_map, X, Y)))
    logger.info(f"Distance estimate {upper_bound:.6g} from start {best} "
                f"after {evaluations} evaluations")
    return DistanceEstimate(
        upper_bound=upper_bound,
        best_map=best_map,
        evaluations=evaluations,
        seed=seed,
        restarts=len(starts),
        restart_values=tuple(math.exp(v) if math.isfinite(v) else math.inf for v in values),
    )
