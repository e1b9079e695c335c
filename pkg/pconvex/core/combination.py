"""
Combination arithmetic: evaluation, p-weight and splitting to unit weight.
"""

import math
import logging
from typing import Union

import numpy as np

from pconvex.core.types import GeneratorSet, PCombination, PExponent, Term, Vector, as_exponent
from pconvex.exceptions import CombinationValidationError, NumericalFailureError

logger = logging.getLogger(__name__)

WEIGHT_TOL = 1e-12
BISECTION_STEPS = 200


def eval_combination(comb: PCombination, gens: GeneratorSet) -> Vector:
    """
    Evaluate sum_i sign_i * lambda_i * gens[index_i].

    The sum is accumulated in term order, so the result is reproducible
    bit for bit.

    Args:
        comb: Combination to evaluate
        gens: Generator set the indices refer to

    Returns:
        Vector of dimension gens.dim (zero vector for an empty combination)

    Raises:
        CombinationValidationError: If an index is out of range
        DimensionMismatchError: If the dimensions disagree
    """
    comb.check_indices(gens)
    value = np.zeros(gens.dim)
    for term in comb.terms:
        value = value + (term.sign * term.lam) * gens.points[term.index]
    return value


def combination_weight(comb: PCombination, p: Union[float, PExponent]) -> float:
    """Sum of lambda_i^p in term order; 0 for the empty combination."""
    exponent = as_exponent(p).value
    weight = 0.0
    for term in comb.terms:
        weight += term.lam ** exponent
    return weight


def split_to_unit_weight(comb: PCombination, p: Union[float, PExponent]) -> PCombination:
    """
    Rewrite a combination of weight in (0, 1] as one of weight exactly 1.

    The largest coefficient lambda_1 is split into k parts: t*lambda_1 and k-1
    equal parts (1-t)*lambda_1/(k-1). k is the least integer with
    k^(1-p) lambda_1^p + rest >= 1 (the equal split maximises the weight), and
    t is found by bisection on [1/k, 1], where the weight decreases
    monotonically from >= 1 to the original weight. The evaluated value is
    unchanged since the parts add up to lambda_1.

    Args:
        comb: Combination with 0 < weight <= 1
        p: Exponent in (0, 1)

    Returns:
        Combination with the same value and weight 1 (within 1e-12); the split
        parts replace lambda_1 in place, t*lambda_1 first

    Raises:
        CombinationValidationError: If the weight exceeds 1 or all coefficients are zero
    """
    exponent = as_exponent(p).value
    weight = combination_weight(comb, exponent)
    if weight > 1.0 + WEIGHT_TOL:
        raise CombinationValidationError(
            f"Cannot split a combination of weight {weight:.17g} > 1",
            details={"weight": weight})
    if not any(term.lam > 0.0 for term in comb.terms):
        raise CombinationValidationError("Cannot split an all-zero combination")
    if abs(weight - 1.0) <= WEIGHT_TOL:
        return comb
    if exponent >= 1.0:
        raise CombinationValidationError(
            "Splitting cannot raise the weight when p = 1", details={"weight": weight})

    position = max(range(len(comb.terms)), key=lambda i: (comb.terms[i].lam, -i))
    largest = comb.terms[position]
    head = largest.lam ** exponent
    rest = weight - head

    def split_weight(t: float, k: int) -> float:
        return ((t * largest.lam) ** exponent
                + (k - 1) ** (1.0 - exponent) * ((1.0 - t) * largest.lam) ** exponent
                + rest)

    k = max(2, int(math.floor(((1.0 - rest) / head) ** (1.0 / (1.0 - exponent)))))
    while k ** (1.0 - exponent) * head + rest < 1.0:
        k += 1

    lo, hi = 1.0 / k, 1.0
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if split_weight(mid, k) >= 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-17:
            break
    t = lo

    result_weight = split_weight(t, k)
    if abs(result_weight - 1.0) > WEIGHT_TOL:
        raise NumericalFailureError(
            f"Bisection ended at weight {result_weight:.17g}",
            details={"k": k, "t": t, "weight_before": weight})

    part = (1.0 - t) * largest.lam / (k - 1)
    pieces = [Term(largest.index, largest.sign, t * largest.lam)]
    pieces += [Term(largest.index, largest.sign, part)] * (k - 1)
    terms = comb.terms[:position] + tuple(pieces) + comb.terms[position + 1:]
    logger.debug(f"Split coefficient {largest.lam:.6g} into {k} parts (t={t:.12f})")
    return PCombination(terms, comb.dim)


def elementary_inequality_gap(x: float, p: float) -> float:
    """1 + p*x - (1+x)^p, which is >= 0 for x >= -1 and 0 < p <= 1."""
    if x < -1.0:
        raise ValueError(f"x must be >= -1, got {x}")
    return 1.0 + p * x - (1.0 + x) ** p
