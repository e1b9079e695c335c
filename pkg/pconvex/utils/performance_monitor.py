"""
Wall time and resident memory of CLI runs.
"""
import time
import logging
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional

import psutil

logger = logging.getLogger(__name__)


def _rss_mb() -> Optional[float]:
    try:
        return psutil.Process().memory_info().rss / (1024 * 1024)
    except (psutil.Error, OSError) as e:
        logger.warning(f"Failed to read resident memory: {e}")
        return None


@dataclass
class RunMetrics:
    """Measurements of one command run. Commands set exit_code before leaving track_run."""
    run_id: str
    command: str
    started: float
    rss_before_mb: Optional[float] = None
    rss_after_mb: Optional[float] = None
    duration_ms: Optional[float] = None
    exit_code: Optional[int] = None
    error: Optional[str] = None

    @property
    def rss_delta_mb(self) -> Optional[float]:
        if self.rss_before_mb is None or self.rss_after_mb is None:
            return None
        return self.rss_after_mb - self.rss_before_mb

    def summary(self) -> Dict[str, Any]:
        return {
            'run_id': self.run_id,
            'command': self.command,
            'duration_ms': round(self.duration_ms or 0.0, 2),
            'memory_after_mb': round(self.rss_after_mb or 0.0, 2),
            'memory_delta_mb': round(self.rss_delta_mb or 0.0, 4),
            'exit_code': self.exit_code,
            'error': self.error
        }


class PerformanceMonitor:
    """
    Bounded history of finished runs.

    One CLI process handles one command; library callers and tests may push
    several runs through the same monitor.
    """

    def __init__(self, max_history: int = 1000):
        self.max_history = max_history
        self._lock = threading.Lock()
        self._history: List[RunMetrics] = []

    @contextmanager
    def track_run(self, run_id: str, command: str) -> Iterator[RunMetrics]:
        """
        Measure the body of the with-block as one run.

        An exception escaping the block records exit code 1 (unless the caller
        set one) and the error text, then propagates.
        """
        metrics = RunMetrics(run_id=run_id, command=command, started=time.perf_counter(),
                             rss_before_mb=_rss_mb())
        logger.debug(f"Tracking run {run_id} ({command})")
        try:
            yield metrics
        except BaseException as e:
            metrics.error = f"{type(e).__name__}: {e}"
            if metrics.exit_code is None:
                metrics.exit_code = 1
            raise
        finally:
            if metrics.exit_code is None:
                metrics.exit_code = 0
            self._record(metrics)

    def _record(self, metrics: RunMetrics) -> None:
        # Never raises
        try:
            metrics.duration_ms = (time.perf_counter() - metrics.started) * 1000
            metrics.rss_after_mb = _rss_mb()
            with self._lock:
                self._history.append(metrics)
                del self._history[:-self.max_history]
            logger.info(
                f"Run {metrics.run_id} ({metrics.command}) exited {metrics.exit_code} "
                f"after {metrics.duration_ms:.2f}ms, memory delta {metrics.rss_delta_mb or 0.0:+.2f}MB"
            )
        except Exception as e:
            logger.warning(f"Failed to record metrics for run {metrics.run_id}: {e}")

    def get_history(self) -> List[Dict[str, Any]]:
        with self._lock:
            return [m.summary() for m in self._history]

    def reset_stats(self) -> None:
        with self._lock:
            self._history.clear()


_performance_monitor: Optional[PerformanceMonitor] = None


def get_performance_monitor() -> PerformanceMonitor:
    """Process-wide monitor (singleton)."""
    global _performance_monitor
    if _performance_monitor is None:
        _performance_monitor = PerformanceMonitor()
    return _performance_monitor


def reset_performance_monitor() -> None:
    global _performance_monitor
    _performance_monitor = None
