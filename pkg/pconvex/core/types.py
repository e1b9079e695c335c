"""
Foundational value types: exponents, generator sets, p-bodies, combinations
and linear maps.

All values are immutable after construction; numpy arrays held by them are
flagged read-only so they can be shared across threads.
"""

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from pconvex.core.linalg import independent_subset
from pconvex.exceptions import (
    CombinationValidationError,
    DimensionMismatchError,
    ExponentValidationError,
    InputValidationError,
    NumericalFailureError,
)

DEFAULT_TOL = 1e-10
MAX_INVERTIBLE_CONDITION = 1e12

Vector = np.ndarray
ArrayLike = Union[Sequence[float], np.ndarray]


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def as_vector(values: ArrayLike, dim: Optional[int] = None, field_name: str = "vector") -> Vector:
    """
    Convert input to a read-only, finite, 1-D float64 vector.

    Args:
        values: Coordinates
        dim: Expected dimension, not checked when None
        field_name: Name used in error messages

    Returns:
        Read-only numpy vector

    Raises:
        InputValidationError: If the input is not a finite 1-D sequence
        DimensionMismatchError: If the dimension differs from dim
    """
    try:
        vector = np.array(values, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise InputValidationError(f"{field_name} is not numeric", field=field_name,
                                   error_code="NOT_NUMERIC") from e
    if vector.ndim != 1 or vector.size == 0:
        raise InputValidationError(f"{field_name} must be a non-empty 1-D sequence",
                                   field=field_name, error_code="NOT_A_VECTOR")
    if not np.all(np.isfinite(vector)):
        raise InputValidationError(f"{field_name} has non-finite entries",
                                   field=field_name, error_code="NON_FINITE")
    if dim is not None and vector.size != dim:
        raise DimensionMismatchError(dim, vector.size, field=field_name)
    return _readonly(vector)


@dataclass(frozen=True)
class PExponent:
    """The exponent governing p-convexity, 0 < value <= 1.

    value = 1 is admitted for envelopes (Banach envelope); bodies built from
    user input go through require_subunit().
    """

    value: float

    def __post_init__(self):
        value = float(self.value)
        if not math.isfinite(value) or not 0.0 < value <= 1.0:
            raise ExponentValidationError(f"Exponent must lie in (0, 1], got {self.value}", value)
        object.__setattr__(self, "value", value)

    def require_subunit(self) -> "PExponent":
        if self.value >= 1.0:
            raise ExponentValidationError(
                f"Exponent must lie in (0, 1) for a p-body, got {self.value}", self.value)
        return self

    def __float__(self) -> float:
        return self.value


def as_exponent(p: Union[float, PExponent]) -> PExponent:
    return p if isinstance(p, PExponent) else PExponent(p)


@dataclass(frozen=True, eq=False)
class GeneratorSet:
    """
    The half-set A of a symmetric body; effective generators are +-points.

    points has shape (m, n): one generator per row.
    """

    points: np.ndarray

    def __post_init__(self):
        try:
            points = np.array(self.points, dtype=np.float64)
        except (TypeError, ValueError) as e:
            raise InputValidationError("generators are not numeric", field="generators") from e
        if points.ndim != 2 or points.shape[0] < 1 or points.shape[1] < 1:
            raise InputValidationError("generators must be a non-empty m x n array",
                                       field="generators", error_code="BAD_SHAPE")
        if not np.all(np.isfinite(points)):
            raise InputValidationError("generators have non-finite entries",
                                       field="generators", error_code="NON_FINITE")
        norms = np.linalg.norm(points, axis=1)
        if np.any(norms == 0.0):
            zero = [int(i) for i in np.flatnonzero(norms == 0.0)]
            raise InputValidationError("zero generator is not allowed", field="generators",
                                       details={"indices": zero}, error_code="ZERO_GENERATOR")
        object.__setattr__(self, "points", _readonly(points))

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    def __len__(self) -> int:
        return int(self.points.shape[0])

    def __getitem__(self, index: int) -> Vector:
        return self.points[index]

    def signed(self) -> np.ndarray:
        """All 2m signed generators in the order +g_0, -g_0, +g_1, -g_1, ..."""
        m, n = self.points.shape
        signed = np.empty((2 * m, n))
        signed[0::2] = self.points
        signed[1::2] = -self.points
        return _readonly(signed)

    def transformed(self, T: "LinearMap") -> "GeneratorSet":
        """Image T(A); p-conv(T A) = T p-conv(A) for every linear T."""
        if T.dim != self.dim:
            raise DimensionMismatchError(self.dim, T.dim, field="map")
        return GeneratorSet(self.points @ T.matrix.T)

    @classmethod
    def canonical(cls, n: int) -> "GeneratorSet":
        return cls(np.eye(n))


@dataclass(frozen=True, eq=False)
class PBody:
    """Symmetric p-convex body p-conv{+-g : g in generators}."""

    generators: GeneratorSet
    p: PExponent
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        object.__setattr__(self, "p", as_exponent(self.p))
        rank = len(independent_subset(self.generators.points, self.tol))
        if rank < self.dim:
            raise InputValidationError(
                f"Generators span a {rank}-dimensional subspace of R^{self.dim}; "
                f"the gauge would not be finite",
                field="generators", details={"rank": rank, "dim": self.dim},
                error_code="RANK_DEFICIENT"
            )

    @property
    def dim(self) -> int:
        return self.generators.dim

    def with_exponent(self, p: Union[float, PExponent]) -> "PBody":
        return PBody(self.generators, as_exponent(p), self.tol)

    @classmethod
    def lp_ball(cls, n: int, p: Union[float, PExponent]) -> "PBody":
        """Unit ball of l_p^n: p-conv{+-e_i}."""
        return cls(GeneratorSet.canonical(n), as_exponent(p))


class Term(NamedTuple):
    """One summand sign * lam * generators[index]."""

    index: int
    sign: int
    lam: float


@dataclass(frozen=True)
class PCombination:
    """Signed nonnegative combination of generators of an n-dimensional body."""

    terms: Tuple[Term, ...]
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise CombinationValidationError(f"dimension must be positive, got {self.dim}")
        checked = []
        for position, term in enumerate(self.terms):
            index, sign, lam = int(term[0]), int(term[1]), float(term[2])
            if index < 0:
                raise CombinationValidationError(
                    f"term {position}: negative generator index {index}",
                    details={"term": position})
            if sign not in (1, -1):
                raise CombinationValidationError(
                    f"term {position}: sign must be +1 or -1, got {sign}",
                    details={"term": position})
            if not math.isfinite(lam) or lam < 0.0:
                raise CombinationValidationError(
                    f"term {position}: coefficient must be finite and nonnegative, got {lam}",
                    details={"term": position})
            checked.append(Term(index, sign, lam))
        object.__setattr__(self, "terms", tuple(checked))

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([t.lam for t in self.terms], dtype=np.float64)

    def support(self) -> "PCombination":
        """Same combination without zero coefficients."""
        return PCombination(tuple(t for t in self.terms if t.lam > 0.0), self.dim)

    def scaled(self, factor: float) -> "PCombination":
        if factor < 0.0:
            raise CombinationValidationError(f"scale factor must be nonnegative, got {factor}")
        return PCombination(tuple(Term(t.index, t.sign, t.lam * factor) for t in self.terms),
                            self.dim)

    def check_indices(self, gens: GeneratorSet) -> None:
        if gens.dim != self.dim:
            raise DimensionMismatchError(gens.dim, self.dim, field="combination")
        for position, term in enumerate(self.terms):
            if term.index >= len(gens):
                raise CombinationValidationError(
                    f"term {position}: generator index {term.index} out of range "
                    f"(have {len(gens)} generators)",
                    details={"term": position, "index": term.index, "generators": len(gens)})

    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[int, int, float]], dim: int) -> "PCombination":
        return cls(tuple(Term(*t) for t in terms), dim)

    @classmethod
    def empty(cls, dim: int) -> "PCombination":
        return cls((), dim)


@dataclass(frozen=True, eq=False)
class LinearMap:
    """Square real matrix acting on R^n."""

    matrix: np.ndarray

    def __post_init__(self):
        try:
            matrix = np.array(self.matrix, dtype=np.float64)
        except (TypeError, ValueError) as e:
            raise InputValidationError("map is not numeric", field="map") from e
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 1:
            raise InputValidationError("map must be a square n x n matrix", field="map",
                                       error_code="BAD_SHAPE")
        if not np.all(np.isfinite(matrix)):
            raise InputValidationError("map has non-finite entries", field="map",
                                       error_code="NON_FINITE")
        object.__setattr__(self, "matrix", _readonly(matrix))

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Apply to a vector (n,) or to a stack of row vectors (N, n)."""
        x = np.asarray(x, dtype=np.float64)
        return self.matrix @ x if x.ndim == 1 else x @ self.matrix.T

    def determinant(self) -> float:
        return float(np.linalg.det(self.matrix))

    def condition_number(self) -> float:
        return float(np.linalg.cond(self.matrix))

    def inverse(self, max_condition: float = MAX_INVERTIBLE_CONDITION) -> "LinearMap":
        cond = self.condition_number()
        if not math.isfinite(cond) or cond > max_condition:
            raise NumericalFailureError(
                f"Map is numerically singular (condition number {cond:.3e})",
                details={"condition_number": cond, "limit": max_condition})
        return LinearMap(np.linalg.inv(self.matrix))

    def normalized(self) -> "LinearMap":
        """Rescale to |det| = 1 (operator-norm products are scale invariant)."""
        det = abs(self.determinant())
        if det == 0.0 or not math.isfinite(det):
            raise NumericalFailureError("Cannot normalize a singular map",
                                        details={"determinant": det})
        return LinearMap(self.matrix / det ** (1.0 / self.dim))

    def compose(self, other: "LinearMap") -> "LinearMap":
        """self after other."""
        return LinearMap(self.matrix @ other.matrix)

    @classmethod
    def identity(cls, n: int) -> "LinearMap":
        return cls(np.eye(n))
