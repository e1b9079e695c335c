"""
Value types, combination arithmetic and exact-tolerance linear algebra.
"""

from .linalg import (
    independent_subset,
    solve_representation,
    orthonormal_basis,
    null_directions,
    clamp_negligible
)

from .types import (
    DEFAULT_TOL,
    PExponent,
    GeneratorSet,
    PBody,
    Term,
    PCombination,
    LinearMap,
    as_exponent,
    as_vector
)

from .combination import (
    eval_combination,
    combination_weight,
    split_to_unit_weight,
    elementary_inequality_gap
)

__all__ = [
    "independent_subset",
    "solve_representation",
    "orthonormal_basis",
    "null_directions",
    "clamp_negligible",
    "DEFAULT_TOL",
    "PExponent",
    "GeneratorSet",
    "PBody",
    "Term",
    "PCombination",
    "LinearMap",
    "as_exponent",
    "as_vector",
    "eval_combination",
    "combination_weight",
    "split_to_unit_weight",
    "elementary_inequality_gap"
]
