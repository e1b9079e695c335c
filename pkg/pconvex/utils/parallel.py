"""
Thread fan-out with results collected in item order.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from pconvex.config import get_settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(threads: Optional[int] = None) -> int:
    """Explicit value if given, otherwise PCONVEX_THREADS (default 1)."""
    if threads is None:
        threads = get_settings().threads
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    return int(threads)


def map_ordered(func: Callable[[T], R], items: Iterable[T],
                threads: Optional[int] = None) -> List[R]:
    """
    Apply func to every item and return the results in item order.

    With one thread (or a single item) the work runs inline. Callers reduce the
    returned list themselves, always in item order, so the outcome never
    depends on the thread count or on scheduling.

    Args:
        func: Pure function of one work item
        items: Work items
        threads: Worker count, defaults to the configured value

    Returns:
        List of results aligned with items
    """
    work = list(items)
    workers = min(resolve_threads(threads), max(1, len(work)))
    if workers == 1:
        return [func(item) for item in work]

    logger.debug(f"Dispatching {len(work)} work items to {workers} threads")
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="pconvex") as pool:
        return list(pool.map(func, work))
