"""
In-memory LRU store for per-body gauge oracles.

An oracle is a pure function of (p, generators, tol), so entries are never
stale; they only leave the store when it is full.
"""
import sys
import hashlib
import logging
import threading
from collections import OrderedDict
from typing import Any, Callable, Dict, Optional

import numpy as np

from pconvex.config import get_settings

logger = logging.getLogger(__name__)


class CacheManager:
    """Thread-safe LRU cache with hit/miss/eviction counters."""

    def __init__(self, max_size: int = 256):
        self.max_size = max(1, int(max_size))
        # Most recently used entries sit at the end
        self._entries: "OrderedDict[str, Any]" = OrderedDict()
        self._lock = threading.RLock()
        self._hits = 0
        self._misses = 0
        self._evictions = 0
        self._removals = 0

    def get(self, key: str) -> Optional[Any]:
        """
        Look up key and mark it as most recently used.

        Returns:
            The stored value, or None on a miss
        """
        with self._lock:
            if key not in self._entries:
                self._misses += 1
                logger.debug(f"Oracle cache miss: {key[:50]}")
                return None
            self._entries.move_to_end(key)
            self._hits += 1
            logger.debug(f"Oracle cache hit: {key[:50]}")
            return self._entries[key]

    def set(self, key: str, value: Any) -> None:
        with self._lock:
            if key in self._entries:
                self._entries.move_to_end(key)
            elif len(self._entries) >= self.max_size:
                evicted, _ = self._entries.popitem(last=False)
                self._evictions += 1
                logger.info(f"Oracle cache full ({self.max_size}), evicted {evicted[:30]}")
            self._entries[key] = value

    def get_or_create(self, key: str, factory: Callable[[], Any]) -> Any:
        """
        Return the value stored under key, building it with factory on a miss.

        The factory runs under the lock; concurrent callers for one key build
        it once.
        """
        with self._lock:
            value = self.get(key)
            if value is None:
                value = factory()
                self.set(key, value)
            return value

    def delete(self, key: str) -> bool:
        with self._lock:
            if self._entries.pop(key, None) is None:
                return False
            self._removals += 1
            return True

    def clear(self) -> None:
        with self._lock:
            self._removals += len(self._entries)
            self._entries.clear()

    def get_stats(self) -> Dict[str, Any]:
        with self._lock:
            lookups = self._hits + self._misses
            return {
                'size': len(self._entries),
                'max_size': self.max_size,
                'hits': self._hits,
                'misses': self._misses,
                'hit_rate_percent': round(100.0 * self._hits / lookups, 2) if lookups else 0.0,
                'evictions': self._evictions,
                'manual_removals': self._removals,
                'total_requests': lookups
            }

    def get_memory_usage_estimate(self) -> Dict[str, Any]:
        """Approximate bytes held, counting numpy buffers referenced by entries."""
        with self._lock:
            sizes = [sys.getsizeof(key) + _estimate_size(value)
                     for key, value in self._entries.items()]
        total = sum(sizes)
        return {
            'total_estimated_bytes': total,
            'total_estimated_mb': round(total / (1024 * 1024), 2),
            'entry_count': len(sizes),
            'largest_entry_size_bytes': max(sizes, default=0)
        }

    @staticmethod
    def generate_body_key(p: float, points: np.ndarray, tol: float) -> str:
        """
        Key of a gauge oracle: SHA-256 over p, tol, the array shape and the
        generator bytes in C order.
        """
        points = np.ascontiguousarray(points, dtype=np.float64)
        digest = hashlib.sha256()
        for part in (np.float64(p), np.float64(tol), np.asarray(points.shape, dtype=np.int64), points):
            digest.update(part.tobytes())
        return f"gauge_oracle:{digest.hexdigest()}"


def _estimate_size(value: Any) -> int:
    arrays = [attr for attr in getattr(value, "__dict__", {}).values()
              if isinstance(attr, np.ndarray)]
    return sys.getsizeof(value) + sum(a.nbytes for a in arrays)


_cache_instance: Optional[CacheManager] = None
_instance_lock = threading.Lock()


def get_cache_manager() -> CacheManager:
    """Process-wide oracle cache, sized from PCONVEX_CACHE_MAX_SIZE on first use."""
    global _cache_instance
    with _instance_lock:
        if _cache_instance is None:
            _cache_instance = CacheManager(max_size=get_settings().cache_max_size)
        return _cache_instance


def reset_cache_manager() -> None:
    """Drop the global cache (used by tests)."""
    global _cache_instance
    with _instance_lock:
        _cache_instance = None
