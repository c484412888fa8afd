"""Tests for structured logging, correlation ids and run metrics."""

import io
import json
import logging

import pytest

from monitoring.observability import (
    JSONFormatter,
    configure_logging,
    create_metrics_collector,
    create_structured_logger,
    observability_context,
)


def json_lines(stream: io.StringIO):
    return [json.loads(line) for line in stream.getvalue().splitlines()]


class TestStructuredLogger:
    def test_entries_are_json_with_correlation(self):
        stream = io.StringIO()
        slog = create_structured_logger("sweep-entries", stream)
        slog.correlation_context.set_correlation_id("abc")
        slog.info("Fitted slope", metadata={"slope": 2.01}, duration_ms=1.5)

        (entry,) = json_lines(stream)
        assert entry["message"] == "Fitted slope"
        assert entry["level"] == "info"
        assert entry["correlation_id"] == "abc"
        assert entry["component"] == "sweep-entries"
        assert entry["metadata"] == {"slope": 2.01}
        assert entry["duration_ms"] == 1.5

    def test_error_records_exception_type(self):
        stream = io.StringIO()
        slog = create_structured_logger("sweep-errors", stream)
        slog.error("Sweep failed", error=ValueError("no samples"))

        (entry,) = json_lines(stream)
        assert entry["error_type"] == "ValueError"
        assert entry["metadata"]["exception_details"] == "no samples"

    def test_json_formatter_for_plain_records(self):
        record = logging.LogRecord("models.pulse_design", logging.INFO, "", 0, "designed %s", ("SP",), None)
        entry = json.loads(JSONFormatter().format(record))
        assert entry["message"] == "designed SP"
        assert entry["logger"] == "models.pulse_design"


class TestMetricsCollector:
    def test_timer_stats(self):
        metrics = create_metrics_collector()
        for value in (1.0, 2.0, 3.0, 4.0):
            metrics.record_timer("scaling_point_ms", value)
        stats = metrics.get_timer_stats("scaling_point_ms")
        assert stats["count"] == 4
        assert stats["avg"] == pytest.approx(2.5)
        assert stats["min"] == 1.0 and stats["max"] == 4.0

    def test_sample_cap(self):
        metrics = create_metrics_collector(max_samples=3)
        for value in range(10):
            metrics.record_timer("t", float(value))
        assert metrics.get_timer_stats("t")["min"] == 7.0

    def test_timed_block(self):
        metrics = create_metrics_collector()
        with metrics.timed("design_root_ms"):
            pass
        assert metrics.get_timer_stats("design_root_ms")["count"] == 1

    def test_counters_and_reset(self):
        metrics = create_metrics_collector()
        metrics.increment_counter("runs")
        metrics.increment_counter("runs", 2)
        assert metrics.get_counter_value("runs") == 3
        metrics.reset_metrics()
        assert metrics.get_all_metrics_snapshot() == {"counters": {}, "timers": {}}

    def test_empty_timer(self):
        assert create_metrics_collector().get_timer_stats("missing")["count"] == 0


class TestObservabilityContext:
    def test_success_is_counted(self):
        metrics = create_metrics_collector()
        with observability_context("budget-ok", "run-9", metrics) as (_, _, correlation_id):
            assert correlation_id == "run-9"
        assert metrics.get_counter_value("budget-ok_succeeded") == 1
        assert metrics.get_timer_stats("budget-ok_duration_ms")["count"] == 1

    def test_failure_is_counted_and_raised(self):
        metrics = create_metrics_collector()
        with pytest.raises(RuntimeError):
            with observability_context("budget-fail", metrics=metrics):
                raise RuntimeError("boom")
        assert metrics.get_counter_value("budget-fail_failed") == 1

    def test_generates_correlation_id(self):
        with observability_context("budget-id", metrics=create_metrics_collector()) as (slog, _, cid):
            assert cid
            assert slog.correlation_context.get_correlation_id() == cid
        assert slog.correlation_context.get_correlation_id() is None


class TestConfigureLogging:
    def test_replaces_its_own_handler(self):
        root = logging.getLogger()
        configure_logging("DEBUG", "text")
        configure_logging("WARNING", "json")
        own = [h for h in root.handlers if getattr(h, "_pulse_budget", False)]
        assert len(own) == 1
        assert isinstance(own[0].formatter, JSONFormatter)
        assert root.level == logging.WARNING
        root.removeHandler(own[0])
        root.setLevel(logging.WARNING)
