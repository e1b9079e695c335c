"""
Constructive Caratheodory reduction for p-convex combinations.

A combination sum_i lam_i v_i (v_i = sign_i * generator) is rewritten on
linearly independent points without increasing sum_i lam_i^p. The elementary
step takes n independent points plus one extra point and drops one of them;
the full reduction repeats it on the support until the support is independent
(or, when the value is 0, has at most n+1 terms).
"""
import math
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from pconvex.config import get_settings
from pconvex.core.combination import combination_weight, eval_combination
from pconvex.core.linalg import (
    NEGLIGIBLE,
    clamp_negligible,
    independent_subset,
    null_directions,
    orthonormal_basis,
    solve_representation,
)
from pconvex.core.types import GeneratorSet, PCombination, PExponent, Term, as_exponent, as_vector
from pconvex.exceptions import (
    CombinationValidationError,
    DimensionMismatchError,
    InputValidationError,
    NumericalFailureError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReductionResult:
    """Outcome of a Caratheodory reduction"""
    combination: PCombination
    iterations: int
    weight_before: float
    weight_after: float

    @property
    def term_count(self) -> int:
        return len(self.combination)


def _resolve_tol(tol: Optional[float]) -> float:
    tol = get_settings().tol if tol is None else float(tol)
    if not tol > 0.0:
        raise InputValidationError(f"tol must be positive, got {tol}", field="tol",
                                   error_code="INVALID_TOLERANCE")
    return tol


def _snap(coeffs: np.ndarray, tol: float) -> Optional[np.ndarray]:
    """
    Nonnegative version of coeffs, or None if an entry is clearly negative.

    Entries within tol * max|coeffs| of zero become exactly zero; p-th powers
    of rounding noise would otherwise inflate the weight.
    """
    scale = float(np.max(np.abs(coeffs))) if coeffs.size else 0.0
    snap = tol * max(scale, NEGLIGIBLE)
    if np.any(coeffs < -snap):
        return None
    snapped = clamp_negligible(coeffs, floor=snap)
    snapped[snapped <= snap] = 0.0
    return snapped


def _weight(coeffs: np.ndarray, exponent: float) -> float:
    weight = 0.0
    for c in coeffs:
        weight += float(c) ** exponent
    return weight


def _candidate(rows: np.ndarray, target: np.ndarray, exponent: float,
               tol: float) -> Optional[Tuple[np.ndarray, float]]:
    """
    Best nonnegative representation of target over rows, with its weight.

    rows holds n vectors of R^n. When they are independent the representation
    is unique. Otherwise the representations form a line c0 + t*d; the weight
    is concave along it, so only the finite ends of the feasible segment are
    evaluated.
    """
    base = solve_representation(rows, target, tol)
    if base is None:
        return None

    null = null_directions(rows, tol)
    if null.shape[1] == 0:
        coeffs = _snap(base, tol)
        return None if coeffs is None else (coeffs, _weight(coeffs, exponent))

    direction = null[:, 0]
    scale = max(float(np.max(np.abs(base))), NEGLIGIBLE)
    lo, hi = -math.inf, math.inf
    lo_at = hi_at = -1
    for i, (b, d) in enumerate(zip(base, direction)):
        if d > NEGLIGIBLE:
            bound = -b / d
            if bound > lo:
                lo, lo_at = bound, i
        elif d < -NEGLIGIBLE:
            bound = -b / d
            if bound < hi:
                hi, hi_at = bound, i
        elif b < -tol * scale:
            return None
    if lo > hi + tol * scale:
        return None

    best: Optional[Tuple[np.ndarray, float]] = None
    for t, binding in ((lo, lo_at), (hi, hi_at)):
        if not math.isfinite(t):
            continue
        point = base + t * direction
        point[binding] = 0.0
        coeffs = _snap(point, tol)
        if coeffs is None:
            continue
        weight = _weight(coeffs, exponent)
        if best is None or weight < best[1]:
            best = (coeffs, weight)
    return best


def lemma4_reduce(
    points: Union[np.ndarray, Sequence[Sequence[float]]],
    q: Union[np.ndarray, Sequence[float]],
    comb: PCombination,
    p: Union[float, PExponent],
    tol: Optional[float] = None,
    *,
    weight_tol: Optional[float] = None
) -> PCombination:
    """
    Drop one of n+1 points from a p-convex combination.

    Slots 0..n-1 of comb refer to the rows of points and slot n to q; each
    slot appears at most once and its sign orients the vector. Candidates are
    tried in the order: drop q, then drop points[0], points[1], ... The first
    candidate whose nonnegative representation has weight <= 1 + weight_tol
    is returned. If none qualifies, the lightest candidate with weight
    <= 1 + tol is returned instead, scaled down to the weight of comb when it
    is heavier; the value then moves by at most a factor (1 + tol)^(1/p).

    Args:
        points: n linearly independent vectors of R^n, shape (n, n)
        q: The extra vector
        comb: Combination over the n+1 slots with weight <= 1 + tol
        p: Exponent
        tol: Feasibility tolerance, defaults to the configured one
        weight_tol: Acceptance slack on the weight, defaults to tol

    Returns:
        Combination of the same value over at most n slots, zero terms removed

    Raises:
        CombinationValidationError: If comb is malformed or too heavy
        NumericalFailureError: If no candidate is feasible
    """
    exponent = as_exponent(p).value
    tol = _resolve_tol(tol)
    weight_tol = tol if weight_tol is None else float(weight_tol)

    rows = np.array(points, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[0] != rows.shape[1]:
        raise InputValidationError("points must be an n x n array", field="points",
                                   error_code="BAD_SHAPE")
    n = rows.shape[0]
    q = as_vector(q, n, field_name="q")
    if comb.dim != n:
        raise DimensionMismatchError(n, comb.dim, field="combination")

    slots_seen = set()
    for term in comb.terms:
        if term.index > n:
            raise CombinationValidationError(
                f"slot {term.index} out of range (have {n + 1} slots)", details={"index": term.index})
        if term.index in slots_seen:
            raise CombinationValidationError(
                f"slot {term.index} appears twice", details={"index": term.index})
        slots_seen.add(term.index)

    weight = combination_weight(comb, exponent)
    if weight > 1.0 + tol:
        raise CombinationValidationError(
            f"Combination weight {weight:.17g} exceeds 1", details={"weight": weight})
    if len(comb.terms) <= n:
        return comb

    signs = np.ones(n + 1)
    for term in comb.terms:
        signs[term.index] = term.sign
    vectors = np.vstack([rows, q]) * signs[:, None]
    target = np.zeros(n)
    for term in comb.terms:
        target = target + term.lam * vectors[term.index]

    fallback: Optional[Tuple[List[int], np.ndarray, float]] = None
    for drop in [n] + list(range(n)):
        keep = [slot for slot in range(n + 1) if slot != drop]
        found = _candidate(vectors[keep], target, exponent, tol)
        if found is None:
            logger.debug(f"Drop candidate {drop}: infeasible")
            continue
        coeffs, candidate_weight = found
        logger.debug(f"Drop candidate {drop}: weight {candidate_weight:.17g}")
        if candidate_weight <= 1.0 + weight_tol:
            return _slot_combination(keep, coeffs, signs, n)
        if candidate_weight <= 1.0 + tol and (fallback is None or candidate_weight < fallback[2]):
            fallback = (keep, coeffs, candidate_weight)

    if fallback is not None:
        keep, coeffs, candidate_weight = fallback
        logger.debug(f"Using lightest drop candidate, weight {candidate_weight:.17g}")
        if candidate_weight > weight:
            coeffs = coeffs * (weight / candidate_weight) ** (1.0 / exponent)
        return _slot_combination(keep, coeffs, signs, n)

    raise NumericalFailureError(
        "No drop-one candidate yields a nonnegative representation of weight <= 1",
        details={"weight": weight, "dimension": n, "tol": tol})


def _slot_combination(keep: List[int], coeffs: np.ndarray, signs: np.ndarray, n: int) -> PCombination:
    terms = tuple(Term(slot, int(signs[slot]), float(c)) for slot, c in zip(keep, coeffs) if c > 0.0)
    return PCombination(terms, n)


def _effective_vectors(terms: Sequence[Term], gens: GeneratorSet) -> np.ndarray:
    return np.array([term.sign * gens.points[term.index] for term in terms])


def _combination_scale(terms: Sequence[Term], vectors: np.ndarray) -> float:
    """sum_i lam_i ||v_i||, the natural size of a combination's value."""
    return float(sum(term.lam * np.linalg.norm(v) for term, v in zip(terms, vectors)))


def _reduction_loop(comb: PCombination, gens: GeneratorSet, exponent: float, tol: float,
                    zero_case: bool) -> Tuple[List[Term], int]:
    n = gens.dim
    terms = list(comb.support().terms)
    passes = 0
    while terms:
        if zero_case and len(terms) <= n + 1:
            break
        vectors = _effective_vectors(terms, gens)
        independent = independent_subset(vectors, tol)
        if len(independent) == len(terms):
            break
        chosen = set(independent)
        dependent = next(i for i in range(len(terms)) if i not in chosen)
        head = independent + [dependent]
        m = len(independent)

        head_lams = np.array([terms[i].lam for i in head])
        s = _weight(head_lams, exponent) ** (1.0 / exponent)
        head_value = np.zeros(n)
        for i in head:
            head_value = head_value + terms[i].lam * vectors[i]

        if zero_case and np.linalg.norm(head_value) <= tol * max(
                _combination_scale([terms[i] for i in head], vectors[head]), NEGLIGIBLE):
            logger.debug(f"Head of {len(head)} terms already represents 0")
            return [terms[i] for i in sorted(head)], passes + 1

        basis = orthonormal_basis(vectors[independent])
        coords = vectors[independent] @ basis
        extra = vectors[dependent] @ basis
        scaled = PCombination(tuple(Term(slot, 1, lam / s) for slot, lam in enumerate(head_lams)), m)
        reduced = lemma4_reduce(coords, extra, scaled, exponent, tol, weight_tol=0.0)

        new_lams = {head[t.index]: t.lam * s for t in reduced.terms}
        head_set = set(head)
        next_terms = []
        for position, term in enumerate(terms):
            if position not in head_set:
                next_terms.append(term)
            elif new_lams.get(position, 0.0) > 0.0:
                next_terms.append(Term(term.index, term.sign, new_lams[position]))
        if len(next_terms) >= len(terms):
            raise NumericalFailureError("Reduction pass did not shorten the support",
                                        details={"support": len(terms), "pass": passes})
        passes += 1
        logger.debug(f"Reduction pass {passes}: support {len(terms)} -> {len(next_terms)}")
        terms = next_terms
    return terms, passes


def _check_reducible(comb: PCombination, gens: GeneratorSet, exponent: float,
                     tol: float) -> Tuple[float, np.ndarray, float]:
    comb.check_indices(gens)
    weight = combination_weight(comb, exponent)
    if weight > 1.0 + tol:
        raise CombinationValidationError(
            f"Combination weight {weight:.17g} exceeds 1", details={"weight": weight})
    value = eval_combination(comb, gens)
    support = comb.support().terms
    scale = _combination_scale(support, _effective_vectors(support, gens)) if support else 0.0
    return weight, value, scale


def caratheodory_reduce(
    comb: PCombination,
    gens: GeneratorSet,
    p: Union[float, PExponent],
    tol: Optional[float] = None
) -> ReductionResult:
    """
    Rewrite a combination with nonzero value on linearly independent points.

    Args:
        comb: Combination over gens with weight <= 1 + tol and nonzero value
        gens: Generator set
        p: Exponent
        tol: Rank and feasibility tolerance

    Returns:
        ReductionResult with at most n terms on independent signed generators
        and weight_after <= weight_before

    Raises:
        CombinationValidationError: If the weight exceeds 1 or the value is 0
        NumericalFailureError: If a drop-one step fails
    """
    exponent = as_exponent(p).value
    tol = _resolve_tol(tol)
    weight_before, value, scale = _check_reducible(comb, gens, exponent, tol)
    if np.linalg.norm(value) <= tol * max(scale, NEGLIGIBLE):
        raise CombinationValidationError(
            "Combination represents 0; use caratheodory_zero",
            details={"value_norm": float(np.linalg.norm(value))})

    terms, passes = _reduction_loop(comb, gens, exponent, tol, zero_case=False)
    result = PCombination(tuple(terms), gens.dim)
    weight_after = combination_weight(result, exponent)
    logger.info(f"Reduced {len(comb)} terms to {len(result)} in {passes} passes "
                f"(weight {weight_before:.6g} -> {weight_after:.6g})")
    return ReductionResult(result, passes, weight_before, weight_after)


def caratheodory_zero(
    comb: PCombination,
    gens: GeneratorSet,
    p: Union[float, PExponent],
    tol: Optional[float] = None
) -> ReductionResult:
    """
    Rewrite a representation of 0 with at most n+1 terms.

    Each pass splits the support into a head (a maximal independent set plus
    the first dependent point) and a tail; the head equals minus the tail, and
    the drop-one step shortens it. A head that already sums to 0 is itself the
    answer.

    Raises:
        CombinationValidationError: If the value is not 0, the weight is 0 or exceeds 1
    """
    exponent = as_exponent(p).value
    tol = _resolve_tol(tol)
    weight_before, value, scale = _check_reducible(comb, gens, exponent, tol)
    if weight_before <= 0.0:
        raise CombinationValidationError("Combination has zero weight")
    value_norm = float(np.linalg.norm(value))
    if value_norm > tol * max(1.0, scale):
        raise CombinationValidationError(
            f"Combination does not represent 0 (norm {value_norm:.3e})",
            details={"value_norm": value_norm})

    terms, passes = _reduction_loop(comb, gens, exponent, tol, zero_case=True)
    result = PCombination(tuple(terms), gens.dim)
    weight_after = combination_weight(result, exponent)
    logger.info(f"Reduced null combination of {len(comb)} terms to {len(result)} in {passes} passes")
    return ReductionResult(result, passes, weight_before, weight_after)
