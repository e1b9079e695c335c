"""
Exception handlers for the pconvex command line.

Every handler turns one family of exceptions into an exit code and the
standardized JSON error object written to stderr.
"""

import sys
import json
import logging
from typing import Any, Callable, Dict, List, Optional, TextIO, Tuple, Type

from pydantic import ValidationError

from pconvex.exceptions import (
    BudgetExceededError,
    InputValidationError,
    NumericalFailureError,
    OutputError,
    PConvexError
)
from pconvex.utils.error_utils import (
    EXIT_BUDGET,
    EXIT_NUMERICAL,
    EXIT_VALIDATION,
    create_error_response,
    get_exit_code_for_error,
    get_standard_message
)

logger = logging.getLogger(__name__)

HandlerResult = Tuple[int, Dict[str, Any]]


def validation_exception_handler(exc: ValidationError, run_id: str) -> HandlerResult:
    """
    Handle pydantic validation errors raised while loading input files.
    """
    error_details = []
    for error in exc.errors():
        error_detail = {
            "field": ".".join(str(loc) for loc in error["loc"]),
            "message": error["msg"],
            "type": error["type"]
        }
        if "input" in error:
            error_detail["input"] = str(error["input"])[:100]
        error_details.append(error_detail)

    logger.warning(f"Validation error {run_id}: {len(error_details)} validation issues")
    return EXIT_VALIDATION, create_error_response(
        "ValidationError",
        get_standard_message("invalid_file", model=exc.title),
        details={"validation_errors": error_details, "error_count": len(error_details)},
        run_id=run_id
    )


def input_validation_exception_handler(exc: InputValidationError, run_id: str) -> HandlerResult:
    """Handle violated preconditions: bad exponents, dimensions, combinations, files."""
    logger.warning(f"Input validation error {run_id}: {exc.message}")
    details = {"field": exc.field, **exc.details}
    if exc.error_code:
        details["error_code"] = exc.error_code
    return EXIT_VALIDATION, create_error_response(type(exc).__name__, exc.message, details, run_id)


def budget_exception_handler(exc: BudgetExceededError, run_id: str) -> HandlerResult:
    logger.warning(f"Budget exceeded {run_id}: {exc.message}")
    return EXIT_BUDGET, create_error_response("BudgetExceededError", exc.message, exc.details, run_id)


def output_exception_handler(exc: OutputError, run_id: str) -> HandlerResult:
    logger.error(f"Output error {run_id}: {exc.message}")
    details = dict(exc.details)
    if exc.original_error is not None:
        details["reason"] = str(exc.original_error)
    return get_exit_code_for_error("OutputError"), create_error_response(
        "OutputError", exc.message, details, run_id)


def numerical_exception_handler(exc: NumericalFailureError, run_id: str) -> HandlerResult:
    logger.error(f"Numerical failure {run_id}: {exc.message}")
    return EXIT_NUMERICAL, create_error_response("NumericalFailureError", exc.message,
                                                 exc.details, run_id)


def pconvex_exception_handler(exc: PConvexError, run_id: str) -> HandlerResult:
    logger.error(f"Error {run_id}: {exc.message}")
    return get_exit_code_for_error(type(exc).__name__), create_error_response(
        type(exc).__name__, exc.message, exc.details, run_id)


def memory_exception_handler(exc: MemoryError, run_id: str) -> HandlerResult:
    logger.error(f"Out of memory {run_id}")
    return EXIT_BUDGET, create_error_response(
        "MemoryError", "The computation ran out of memory; lower the sample or subset counts",
        run_id=run_id)


def generic_exception_handler(exc: Exception, run_id: str) -> HandlerResult:
    """
    Handle unexpected exceptions. The traceback goes to the log, never to the
    error object.
    """
    logger.error(f"Unexpected error {run_id}: {type(exc).__name__}: {exc}", exc_info=True)
    return EXIT_NUMERICAL, create_error_response(
        "InternalError", get_standard_message("internal_error"),
        details={"type": type(exc).__name__}, run_id=run_id)


# First match wins: subclasses before their bases
EXCEPTION_HANDLERS: List[Tuple[Type[BaseException], Callable[[Any, str], HandlerResult]]] = [
    (ValidationError, validation_exception_handler),
    (InputValidationError, input_validation_exception_handler),
    (BudgetExceededError, budget_exception_handler),
    (OutputError, output_exception_handler),
    (NumericalFailureError, numerical_exception_handler),
    (PConvexError, pconvex_exception_handler),
    (MemoryError, memory_exception_handler),
    (Exception, generic_exception_handler),
]


def handle_exception(exc: Exception, run_id: str, stream: Optional[TextIO] = None) -> int:
    """
    Write the error object for exc to stream (stderr) and return the exit code.
    """
    for exc_type, handler in EXCEPTION_HANDLERS:
        if isinstance(exc, exc_type):
            exit_code, payload = handler(exc, run_id)
            break
    else:
        exit_code, payload = generic_exception_handler(exc, run_id)
    stream = sys.stderr if stream is None else stream
    stream.write(json.dumps(payload, default=str) + "\n")
    return exit_code
