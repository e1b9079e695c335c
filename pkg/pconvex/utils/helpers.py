"""
Utility functions shared by the command line and the report models.
"""

import os
import time
import uuid
from datetime import datetime, timezone
from typing import Optional

SOURCE_DATE_EPOCH = "SOURCE_DATE_EPOCH"


def generate_run_id(prefix: str = "run") -> str:
    """
    Generate a unique run ID.

    Args:
        prefix: Optional prefix for the run ID

    Returns:
        A unique run ID string
    """
    timestamp = int(time.time() * 1000)  # milliseconds
    unique_id = uuid.uuid4().hex[:8]
    return f"{prefix}_{timestamp}_{unique_id}"


def get_current_timestamp() -> datetime:
    """
    Get the current UTC timestamp, or SOURCE_DATE_EPOCH when it is set.

    Returns:
        Timezone-aware datetime in UTC
    """
    epoch = os.environ.get(SOURCE_DATE_EPOCH, "").strip()
    if epoch:
        try:
            return datetime.fromtimestamp(int(epoch), tz=timezone.utc)
        except ValueError:
            pass
    return datetime.now(timezone.utc)


def format_float(value: Optional[float]) -> str:
    """17 significant digits, enough to round-trip any float64."""
    if value is None:
        return ""
    return format(float(value), ".17g")
