"""
Validation utilities for command-line and library inputs.
"""

import math
import re
from typing import Optional

import numpy as np

from pconvex.exceptions import ExponentValidationError, InputValidationError
from pconvex.utils.rng import MAX_SEED


class ValidationResult:
    """Result of a validation operation."""

    def __init__(self, is_valid: bool, error_message: Optional[str] = None,
                 error_code: Optional[str] = None, value=None):
        self.is_valid = is_valid
        self.error_message = error_message
        self.error_code = error_code
        self.value = value


class InputValidator:
    """Validator for numeric parameters and vector strings."""

    def __init__(self):
        """Initialize the InputValidator."""
        self.MAX_TOL = 1e-2
        self.MAX_DIMENSION = 64
        self.vector_separator = re.compile(r"\s*,\s*")

    def validate_exponent(self, p: float, allow_one: bool = False, field_name: str = "p") -> ValidationResult:
        """
        Validate an exponent.

        Args:
            p: Exponent to validate
            allow_one: Whether p = 1 is admissible (envelopes)
            field_name: Name of the field being validated

        Returns:
            ValidationResult indicating if p is valid
        """
        if isinstance(p, bool) or not isinstance(p, (int, float)) or not math.isfinite(p):
            return ValidationResult(False, f"{field_name} must be a finite number", "INVALID_EXPONENT")
        upper_ok = p <= 1.0 if allow_one else p < 1.0
        if p <= 0.0 or not upper_ok:
            interval = "(0, 1]" if allow_one else "(0, 1)"
            return ValidationResult(False, f"{field_name} must lie in {interval}, got {p}",
                                    "INVALID_EXPONENT")
        return ValidationResult(True, value=float(p))

    def validate_tolerance(self, tol: float) -> ValidationResult:
        if not isinstance(tol, (int, float)) or not math.isfinite(tol) or tol <= 0.0:
            return ValidationResult(False, f"tolerance must be positive, got {tol}", "INVALID_TOLERANCE")
        if tol > self.MAX_TOL:
            return ValidationResult(False, f"tolerance must not exceed {self.MAX_TOL}, got {tol}",
                                    "INVALID_TOLERANCE")
        return ValidationResult(True, value=float(tol))

    def validate_count(self, value: int, field_name: str, minimum: int = 1) -> ValidationResult:
        """
        Validate an integer count such as samples, trials or restarts.

        Args:
            value: Count to validate
            field_name: Name of the field being validated
            minimum: Smallest admissible value

        Returns:
            ValidationResult indicating if the count is valid
        """
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            return ValidationResult(False, f"{field_name} must be an integer", "INVALID_COUNT")
        if value < minimum:
            return ValidationResult(False, f"{field_name} must be >= {minimum}, got {value}",
                                    "INVALID_COUNT")
        return ValidationResult(True, value=int(value))

    def validate_seed(self, seed: Optional[int]) -> ValidationResult:
        if seed is None:
            return ValidationResult(False, "--seed is required for stochastic commands", "SEED_REQUIRED")
        if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not 0 <= seed < MAX_SEED:
            return ValidationResult(False, f"seed must be an integer in [0, 2^63), got {seed}",
                                    "INVALID_SEED")
        return ValidationResult(True, value=int(seed))

    def validate_dimension(self, n: int) -> ValidationResult:
        result = self.validate_count(n, "n")
        if result.is_valid and n > self.MAX_DIMENSION:
            return ValidationResult(False, f"n must not exceed {self.MAX_DIMENSION}, got {n}",
                                    "DIMENSION_TOO_LARGE")
        return result

    def validate_vector_string(self, text: str, dim: Optional[int] = None) -> ValidationResult:
        """
        Parse a comma separated vector such as "0.25,0.25".

        Args:
            text: Vector string
            dim: Expected dimension, not checked when None

        Returns:
            ValidationResult whose value is the parsed numpy vector
        """
        if text is None or not text.strip():
            return ValidationResult(False, "vector cannot be empty", "EMPTY_VECTOR")
        parts = self.vector_separator.split(text.strip())
        try:
            coords = [float(part) for part in parts]
        except ValueError:
            return ValidationResult(False, f"vector must be comma separated numbers, got '{text}'",
                                    "INVALID_VECTOR")
        if not all(math.isfinite(c) for c in coords):
            return ValidationResult(False, "vector has non-finite entries", "NON_FINITE")
        if dim is not None and len(coords) != dim:
            return ValidationResult(False, f"vector has dimension {len(coords)}, body has dimension {dim}",
                                    "DIMENSION_MISMATCH")
        return ValidationResult(True, value=np.array(coords, dtype=np.float64))

    def validate_int_list(self, text: str, field_name: str) -> ValidationResult:
        """Parse a comma separated list of positive integers such as "2,3,4"."""
        try:
            values = [int(part) for part in self.vector_separator.split(text.strip())]
        except (AttributeError, ValueError):
            return ValidationResult(False, f"{field_name} must be comma separated integers, got '{text}'",
                                    "INVALID_LIST")
        for value in values:
            result = self.validate_dimension(value)
            if not result.is_valid:
                return result
        return ValidationResult(True, value=values)


def ensure_valid(result: ValidationResult, field_name: str):
    """
    Return result.value, or raise the matching InputValidationError.

    Args:
        result: Outcome of an InputValidator method
        field_name: Field reported in the error

    Returns:
        The validated value
    """
    if result.is_valid:
        return result.value
    if result.error_code == "INVALID_EXPONENT":
        raise ExponentValidationError(result.error_message, value=float("nan"),
                                      details={"field": field_name})
    raise InputValidationError(result.error_message, field=field_name,
                               error_code=result.error_code)
