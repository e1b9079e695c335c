"""
Error objects and exit codes shared by the CLI error handlers.
"""

from typing import Dict, Any, Optional

from pconvex.utils.helpers import generate_run_id, get_current_timestamp

EXIT_SUCCESS = 0
EXIT_VALIDATION = 2
EXIT_BUDGET = 3
EXIT_NUMERICAL = 4


def create_error_response(
    error_type: str,
    message: str,
    details: Optional[Dict[str, Any]] = None,
    run_id: Optional[str] = None
) -> Dict[str, Any]:
    """
    The JSON object written to stderr when a run fails.

    Args:
        error_type: Exception class name, or "InternalError"
        message: Human-readable error message
        details: Structured context (field, limits, offending values)
        run_id: Run that failed; a fresh "err_" id when missing
    """
    return {
        "error": error_type,
        "message": message,
        "details": details or {},
        "run_id": run_id or generate_run_id("err"),
        "timestamp": get_current_timestamp().isoformat()
    }


# Exit codes by error type name; builtins included for the errors the CLI maps itself
ERROR_EXIT_CODES = {
    "InputValidationError": EXIT_VALIDATION,
    "ExponentValidationError": EXIT_VALIDATION,
    "DimensionMismatchError": EXIT_VALIDATION,
    "CombinationValidationError": EXIT_VALIDATION,
    "ValidationError": EXIT_VALIDATION,
    "JSONDecodeError": EXIT_VALIDATION,
    "OutputError": EXIT_VALIDATION,
    "BudgetExceededError": EXIT_BUDGET,
    "MemoryError": EXIT_BUDGET,
    "NumericalFailureError": EXIT_NUMERICAL,
    "InternalError": EXIT_NUMERICAL
}


def get_exit_code_for_error(error_type: str) -> int:
    """Exit code for an error type name; unknown types are internal failures (4)."""
    return ERROR_EXIT_CODES.get(error_type, EXIT_NUMERICAL)


STANDARD_ERROR_MESSAGES = {
    "malformed_json": "File '{path}' is not valid JSON: {reason}",
    "invalid_file": "Input does not match the {model} format",
    "missing_file": "File '{path}' does not exist",
    "internal_error": "An internal numerical error occurred"
}


def get_standard_message(message_key: str, **kwargs) -> str:
    """Message template for message_key, formatted when all its fields are given."""
    message = STANDARD_ERROR_MESSAGES.get(message_key, "An error occurred")
    try:
        return message.format(**kwargs)
    except (KeyError, ValueError):
        return message
