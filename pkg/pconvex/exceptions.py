"""
Custom exceptions for the pconvex library and command line.
"""

from typing import Optional, Dict, Any


class PConvexError(Exception):
    """
    Base class for every error raised by pconvex.

    Carries a human readable message, a details dictionary that the command
    line echoes into its JSON error object, and optionally the lower level
    exception that caused it.
    """

    def __init__(
        self,
        message: str,
        details: Optional[Dict[str, Any]] = None,
        original_error: Optional[Exception] = None
    ):
        self.message = message
        self.details = details or {}
        self.original_error = original_error
        super().__init__(self.message)


class InputValidationError(PConvexError, ValueError):
    """
    Exception raised when an input violates a documented precondition.

    This is a specialized ValueError so callers that only know about the
    builtin still catch it.
    """

    def __init__(
        self,
        message: str,
        field: str = "input",
        details: Optional[Dict[str, Any]] = None,
        error_code: Optional[str] = None
    ):
        self.field = field
        self.error_code = error_code
        super().__init__(message, details=details)


class ExponentValidationError(InputValidationError):
    """Exception raised when an exponent p or q is outside its admissible range."""

    def __init__(self, message: str, value: float, details: Optional[Dict[str, Any]] = None):
        self.value = value
        super().__init__(message, field="p", details={"value": value, **(details or {})},
                         error_code="INVALID_EXPONENT")


class DimensionMismatchError(InputValidationError):
    """Exception raised when vectors, maps or bodies disagree on the dimension."""

    def __init__(self, expected: int, actual: int, field: str = "dimension"):
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"Dimension mismatch: expected {expected}, got {actual}",
            field=field,
            details={"expected": expected, "actual": actual},
            error_code="DIMENSION_MISMATCH"
        )


class CombinationValidationError(InputValidationError):
    """Exception raised when a combination is malformed or has an inadmissible weight."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, field="combination", details=details,
                         error_code="INVALID_COMBINATION")


class BudgetExceededError(PConvexError):
    """
    Exception raised when a computation would exceed its resource budget.

    Used for the subset-enumeration guard of the gauge oracle and for
    evaluation budgets that cannot be honoured.
    """

    def __init__(self, resource: str, required: int, limit: int):
        self.resource = resource
        self.required = required
        self.limit = limit
        super().__init__(
            f"{resource} requires {required} units, budget is {limit}",
            details={"resource": resource, "required": required, "limit": limit}
        )


class NumericalFailureError(PConvexError):
    """
    Exception raised when a numerical procedure cannot produce a valid answer.

    The library raises instead of returning a result it cannot certify.
    """


class OutputError(PConvexError):
    """Exception raised when results cannot be written to the requested location."""

    def __init__(self, path: str, original_error: Optional[Exception] = None):
        self.path = path
        super().__init__(
            f"Cannot write output to '{path}'",
            details={"path": path},
            original_error=original_error
        )
