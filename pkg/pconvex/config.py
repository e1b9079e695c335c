"""
Runtime settings for pconvex, read from the environment.
"""

import os
import logging
from typing import Optional, Dict, Mapping

from pydantic import BaseModel, Field, ValidationError, field_validator

from pconvex.exceptions import InputValidationError

logger = logging.getLogger(__name__)


# Environment variable -> Settings field
ENV_VARS: Dict[str, str] = {
    "PCONVEX_THREADS": "threads",
    "PCONVEX_TOL": "tol",
    "PCONVEX_GAUGE_BUDGET": "gauge_budget",
    "PCONVEX_CACHE_MAX_SIZE": "cache_max_size",
    "PCONVEX_LOG_LEVEL": "log_level",
}


class Settings(BaseModel):
    """Library-wide defaults. Explicit function arguments always win."""

    model_config = {"frozen": True}

    threads: int = Field(default=1, ge=1, le=256)
    tol: float = Field(default=1e-10, gt=0.0, lt=1e-2)
    gauge_budget: int = Field(default=1_000_000, ge=1)
    cache_max_size: int = Field(default=256, ge=1)
    log_level: str = "WARNING"

    @field_validator("log_level")
    @classmethod
    def _check_log_level(cls, value: str) -> str:
        level = value.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level '{value}'")
        return level

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "Settings":
        """
        Build settings from environment variables.

        Args:
            environ: Mapping to read from, defaults to os.environ

        Returns:
            Validated Settings instance

        Raises:
            InputValidationError: If a variable holds an invalid value
        """
        environ = os.environ if environ is None else environ
        values = {
            field: environ[var]
            for var, field in ENV_VARS.items()
            if environ.get(var, "").strip()
        }
        try:
            return cls(**values)
        except ValidationError as e:
            bad = [".".join(str(loc) for loc in err["loc"]) for err in e.errors()]
            raise InputValidationError(
                f"Invalid environment configuration: {', '.join(bad)}",
                field="environment",
                details={"fields": bad},
                error_code="INVALID_ENVIRONMENT"
            ) from e


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """
    Get the process-wide settings (singleton pattern)

    Returns:
        Settings instance
    """
    global _settings
    if _settings is None:
        _settings = Settings.from_env()
        logger.debug(f"Loaded settings: {_settings.model_dump()}")
    return _settings


def reset_settings() -> None:
    """Forget cached settings so the environment is read again (useful for testing)"""
    global _settings
    _settings = None
