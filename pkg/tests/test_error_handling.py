"""Tests for error classification, exit codes and the logging error context."""

import logging

import pytest

from monitoring.error_handling import (
    EXIT_USAGE,
    EXIT_VERIFICATION,
    ConfigurationError,
    DegenerateFitError,
    DesignFailure,
    ErrorCategory,
    ErrorClassifier,
    OracleError,
    PulseParseError,
    VerificationFailure,
    build_error_context,
    error_handling_context,
)


class TestClassification:
    @pytest.mark.parametrize(
        "error, category",
        [
            (PulseParseError(3, "bad number"), ErrorCategory.PARSING_ERROR),
            (DesignFailure("no sign change"), ErrorCategory.DESIGN_ERROR),
            (OracleError("no convergence"), ErrorCategory.NUMERICAL_ERROR),
            (DegenerateFitError("zero sample"), ErrorCategory.NUMERICAL_ERROR),
            (VerificationFailure("eta_tau_1 != 0"), ErrorCategory.VERIFICATION_ERROR),
            (ConfigurationError("missing flag"), ErrorCategory.CONFIGURATION_ERROR),
            (FileNotFoundError("pulse.txt"), ErrorCategory.IO_ERROR),
            (ValueError("bad"), ErrorCategory.VALIDATION_ERROR),
            (RuntimeError("boom"), ErrorCategory.UNKNOWN_ERROR),
        ],
    )
    def test_categories(self, error, category):
        assert ErrorClassifier.classify_error(error) == category

    def test_exit_codes(self):
        assert ErrorClassifier.exit_code_for(ErrorCategory.VERIFICATION_ERROR) == EXIT_VERIFICATION
        for category in ErrorCategory:
            if category != ErrorCategory.VERIFICATION_ERROR:
                assert ErrorClassifier.exit_code_for(category) == EXIT_USAGE

    def test_user_message_keeps_the_detail(self):
        error = PulseParseError(7, "expected two fields")
        message = ErrorClassifier.get_user_message(ErrorCategory.PARSING_ERROR, error)
        assert message == "Could not parse input: line 7: expected two fields"

    def test_failures_carry_their_payload(self):
        assert DesignFailure("x", scanned=[(0.1, -1.0)]).scanned == [(0.1, -1.0)]
        assert DesignFailure("x").scanned == []
        assert VerificationFailure("x", report={"ok": False}).report == {"ok": False}


class TestErrorContext:
    def test_build_error_context(self):
        try:
            raise OracleError("quadrature did not converge")
        except OracleError as e:
            context = build_error_context(e, "run-1")

        assert context.error_category == ErrorCategory.NUMERICAL_ERROR
        assert "OracleError" in context.technical_details
        assert context.to_dict() == {
            "error_category": "numerical_error",
            "error_type": "OracleError",
            "correlation_id": "run-1",
            "user_message": "Numerical evaluation failed: quadrature did not converge",
        }

    def test_context_logs_and_reraises(self, caplog):
        with caplog.at_level(logging.ERROR, logger="monitoring.error_handling"):
            with pytest.raises(DegenerateFitError):
                with error_handling_context("run-2"):
                    raise DegenerateFitError("zero sample")
        assert "numerical_error: zero sample" in caplog.text
        assert "run-2" in caplog.text

    def test_context_is_transparent_on_success(self, caplog):
        with caplog.at_level(logging.ERROR):
            with error_handling_context():
                value = 1 + 1
        assert value == 2
        assert not caplog.records
