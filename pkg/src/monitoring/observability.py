"""
Observability Module for pulse analysis runs.

Implements structured JSON logging, run correlation, and timing metrics.
All output goes to stderr so emitted files and stdout reports stay
byte-identical between runs.
"""

import json
import logging
import sys
import threading
import time
import traceback
import uuid
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, Iterator, List, Optional, Tuple


class LogLevel(Enum):
    """Log levels for structured logging."""

    DEBUG = "debug"
    INFO = "info"
    WARNING = "warning"
    ERROR = "error"
    CRITICAL = "critical"


@dataclass
class LogEntry:
    """Structured log entry."""

    timestamp: str
    level: str
    message: str
    correlation_id: Optional[str] = None
    component: Optional[str] = None
    duration_ms: Optional[float] = None
    error_type: Optional[str] = None
    metadata: Dict[str, Any] = field(default_factory=dict)


def _utc_timestamp() -> str:
    return datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")


class JSONFormatter(logging.Formatter):
    """Render plain log records as one JSON object per line."""

    def format(self, record: logging.LogRecord) -> str:
        # Already structured
        if getattr(record, "structured", False):
            return record.getMessage()

        log_entry = {
            "timestamp": _utc_timestamp(),
            "level": record.levelname.lower(),
            "component": getattr(record, "component", record.name),
            "message": record.getMessage(),
            "logger": record.name,
        }
        if record.exc_info:
            log_entry["exception"] = self.formatException(record.exc_info)
        return json.dumps(log_entry)


def configure_logging(level: str = "INFO", log_format: str = "json") -> None:
    """
    Install a single stderr handler on the root logger.

    Args:
        level: Logging level name
        log_format: "json" for structured lines, "text" for human-readable
    """
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, "_pulse_budget", False):
            root.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    handler._pulse_budget = True  # type: ignore[attr-defined]
    if log_format == "json":
        handler.setFormatter(JSONFormatter())
    else:
        handler.setFormatter(
            logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s")
        )
    root.addHandler(handler)
    root.setLevel(getattr(logging, level.upper(), logging.INFO))


class CorrelationContext:
    """Thread-local storage for the run correlation id."""

    def __init__(self):
        self._local = threading.local()

    def set_correlation_id(self, correlation_id: str):
        """Set correlation ID for current thread."""
        self._local.correlation_id = correlation_id

    def get_correlation_id(self) -> Optional[str]:
        """Get correlation ID for current thread."""
        return getattr(self._local, "correlation_id", None)

    def clear(self):
        """Clear all context for current thread."""
        if hasattr(self._local, "correlation_id"):
            delattr(self._local, "correlation_id")


class StructuredLogger:
    """
    Structured logger with correlation support and JSON output.
    """

    def __init__(self, name: str, stream=None):
        """
        Initialize structured logger.

        Args:
            name: Logger name (typically component name)
            stream: Output stream, stderr by default
        """
        self.name = name
        self.correlation_context = CorrelationContext()
        self.logger = logging.getLogger(f"structured.{name}")
        self.logger.setLevel(logging.DEBUG)
        self.logger.propagate = False

        if not self.logger.handlers:
            handler = logging.StreamHandler(stream or sys.stderr)
            handler.setFormatter(JSONFormatter())
            self.logger.addHandler(handler)

    def _create_log_entry(
        self,
        level: LogLevel,
        message: str,
        duration_ms: Optional[float] = None,
        error_type: Optional[str] = None,
        metadata: Optional[Dict[str, Any]] = None,
    ) -> LogEntry:
        return LogEntry(
            timestamp=_utc_timestamp(),
            level=level.value,
            message=message,
            correlation_id=self.correlation_context.get_correlation_id(),
            component=self.name,
            duration_ms=duration_ms,
            error_type=error_type,
            metadata=metadata or {},
        )

    def _log_entry(self, entry: LogEntry):
        record = self.logger.makeRecord(
            name=self.logger.name,
            level=getattr(logging, entry.level.upper()),
            fn="",
            lno=0,
            msg=json.dumps(asdict(entry), default=str),
            args=(),
            exc_info=None,
        )
        record.structured = True
        self.logger.handle(record)

    def debug(self, message: str, **kwargs):
        self._log_entry(self._create_log_entry(LogLevel.DEBUG, message, **kwargs))

    def info(self, message: str, **kwargs):
        self._log_entry(self._create_log_entry(LogLevel.INFO, message, **kwargs))

    def warning(self, message: str, **kwargs):
        self._log_entry(self._create_log_entry(LogLevel.WARNING, message, **kwargs))

    def error(self, message: str, error: Optional[Exception] = None, **kwargs):
        """Log error message with optional exception details."""
        metadata = dict(kwargs.pop("metadata", None) or {})
        error_type = None
        if error is not None:
            error_type = type(error).__name__
            metadata["exception_details"] = str(error)
            metadata["traceback"] = traceback.format_exc()

        entry = self._create_log_entry(
            LogLevel.ERROR, message, error_type=error_type, metadata=metadata, **kwargs
        )
        self._log_entry(entry)


class MetricsCollector:
    """
    Collects counters and timing samples for a run.
    """

    def __init__(self, max_samples: int = 1000):
        self.max_samples = max_samples
        self._counters: Dict[str, int] = defaultdict(int)
        self._timers: Dict[str, List[float]] = defaultdict(list)
        self._lock = threading.RLock()

    def increment_counter(self, name: str, value: int = 1):
        """Increment a counter metric."""
        with self._lock:
            self._counters[name] += value

    def record_timer(self, name: str, duration_ms: float):
        """Record a timing measurement."""
        with self._lock:
            samples = self._timers[name]
            samples.append(duration_ms)
            if len(samples) > self.max_samples:
                del samples[: len(samples) - self.max_samples]

    @contextmanager
    def timed(self, name: str) -> Iterator[None]:
        """Time the enclosed block into timer `name`."""
        start = time.perf_counter()
        try:
            yield
        finally:
            self.record_timer(name, (time.perf_counter() - start) * 1000)

    def get_counter_value(self, name: str) -> int:
        with self._lock:
            return self._counters.get(name, 0)

    def get_timer_stats(self, name: str) -> Dict[str, float]:
        """Get timer statistics."""
        with self._lock:
            timings = sorted(self._timers.get(name, []))

        if not timings:
            return {"count": 0, "avg": 0, "min": 0, "max": 0, "p95": 0}

        count = len(timings)
        p95_index = max(0, min(count - 1, int(count * 0.95)))
        return {
            "count": count,
            "avg": sum(timings) / count,
            "min": timings[0],
            "max": timings[-1],
            "p95": timings[p95_index],
        }

    def get_all_metrics_snapshot(self) -> Dict[str, Any]:
        """Get snapshot of all current metrics."""
        with self._lock:
            names = list(self._timers)
            counters = dict(self._counters)
        return {
            "counters": counters,
            "timers": {name: self.get_timer_stats(name) for name in names},
        }

    def reset_metrics(self):
        with self._lock:
            self._counters.clear()
            self._timers.clear()


_default_metrics = MetricsCollector()


def get_metrics() -> MetricsCollector:
    """Process-wide metrics collector used by library code."""
    return _default_metrics


@contextmanager
def observability_context(
    component_name: str,
    correlation_id: Optional[str] = None,
    metrics: Optional[MetricsCollector] = None,
) -> Iterator[Tuple[StructuredLogger, MetricsCollector, str]]:
    """
    Context manager for observability with automatic correlation ID management.

    Args:
        component_name: Name of the component being monitored
        correlation_id: Optional correlation ID, generates one if None
        metrics: Collector to use, the process-wide one by default

    Yields:
        Tuple of (logger, metrics_collector, correlation_id)
    """
    if correlation_id is None:
        correlation_id = str(uuid.uuid4())

    logger = StructuredLogger(component_name)
    metrics = metrics or get_metrics()
    logger.correlation_context.set_correlation_id(correlation_id)

    start = time.perf_counter()
    try:
        logger.info(f"Starting {component_name}")
        yield logger, metrics, correlation_id

        duration_ms = (time.perf_counter() - start) * 1000
        metrics.increment_counter(f"{component_name}_succeeded")
        metrics.record_timer(f"{component_name}_duration_ms", duration_ms)
        logger.info(f"Completed {component_name}", duration_ms=duration_ms)

    except Exception as e:
        duration_ms = (time.perf_counter() - start) * 1000
        metrics.increment_counter(f"{component_name}_failed")
        logger.error(f"Failed {component_name}", error=e, duration_ms=duration_ms)
        raise

    finally:
        logger.correlation_context.clear()


def create_structured_logger(component_name: str, stream=None) -> StructuredLogger:
    """Create structured logger instance."""
    return StructuredLogger(component_name, stream)


def create_metrics_collector(max_samples: int = 1000) -> MetricsCollector:
    """Create metrics collector instance."""
    return MetricsCollector(max_samples)
