"""
Shared utilities: caching, monitoring, validation, randomness and threading.
"""

from .helpers import (
    generate_run_id,
    get_current_timestamp,
    format_float
)

from .rng import make_generator, derive_seed, validate_seed

from .parallel import map_ordered, resolve_threads

from .validators import (
    InputValidator,
    ValidationResult,
    ensure_valid
)

__all__ = [
    # Helper functions
    "generate_run_id",
    "get_current_timestamp",
    "format_float",

    # Randomness and threads
    "make_generator",
    "derive_seed",
    "validate_seed",
    "map_ordered",
    "resolve_threads",

    # Validation
    "InputValidator",
    "ValidationResult",
    "ensure_valid"
]
