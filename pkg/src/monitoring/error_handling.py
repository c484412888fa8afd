"""
Error Handling Module for the Pulse Error Budget toolkit.

Defines the typed exception hierarchy raised by the library, the error
categories used for reporting, and the mapping from categories to CLI exit
codes and user-facing messages.
"""

import logging
import traceback
from contextlib import contextmanager
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterator, List, Optional

logger = logging.getLogger(__name__)


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION = 2


class ErrorCategory(Enum):
    """Categories of errors for targeted handling."""

    PARSING_ERROR = "parsing_error"
    VALIDATION_ERROR = "validation_error"
    DOMAIN_ERROR = "domain_error"
    DESIGN_ERROR = "design_error"
    NUMERICAL_ERROR = "numerical_error"
    VERIFICATION_ERROR = "verification_error"
    CONFIGURATION_ERROR = "configuration_error"
    IO_ERROR = "io_error"
    UNKNOWN_ERROR = "unknown_error"


class PulseBudgetError(Exception):
    """Base class for all errors raised by the toolkit."""

    category = ErrorCategory.UNKNOWN_ERROR


class PulseParseError(PulseBudgetError):
    """Raised when a pulse or matrix file cannot be parsed."""

    category = ErrorCategory.PARSING_ERROR

    def __init__(self, line_number: int, reason: str):
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"line {line_number}: {reason}")


class InvalidGeometryError(PulseBudgetError):
    """Raised when pulse parameters describe an impossible shape."""

    category = ErrorCategory.VALIDATION_ERROR


class PulseDomainError(PulseBudgetError):
    """Raised when an argument lies outside the domain of an operation."""

    category = ErrorCategory.DOMAIN_ERROR


class DesignFailure(PulseBudgetError):
    """Raised when the pulse designer cannot bracket a root."""

    category = ErrorCategory.DESIGN_ERROR

    def __init__(self, message: str, scanned: Optional[List[tuple]] = None):
        self.scanned = scanned or []
        super().__init__(message)


class OracleError(PulseBudgetError):
    """Raised when the quadrature oracle fails to converge."""

    category = ErrorCategory.NUMERICAL_ERROR


class OperatorContractError(PulseBudgetError):
    """Raised when an operator violates a documented precondition."""

    category = ErrorCategory.VALIDATION_ERROR


class DegenerateFitError(PulseBudgetError):
    """Raised when a log-log fit receives non-positive samples."""

    category = ErrorCategory.NUMERICAL_ERROR


class VerificationFailure(PulseBudgetError):
    """Raised when a computed result disagrees with an expected value."""

    category = ErrorCategory.VERIFICATION_ERROR

    def __init__(self, message: str, report: Any = None):
        self.report = report
        super().__init__(message)


class ConfigurationError(PulseBudgetError):
    """Raised for invalid run configuration."""

    category = ErrorCategory.CONFIGURATION_ERROR


@dataclass
class ErrorContext:
    """Context information for error handling."""

    error_category: ErrorCategory
    original_error: Exception
    correlation_id: Optional[str] = None
    user_message: Optional[str] = None
    technical_details: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error_category": self.error_category.value,
            "error_type": type(self.original_error).__name__,
            "correlation_id": self.correlation_id,
            "user_message": self.user_message,
        }


class ErrorClassifier:
    """
    Classifies errors into categories for appropriate handling.
    """

    @staticmethod
    def classify_error(error: Exception) -> ErrorCategory:
        """
        Classify an error into appropriate category.

        Args:
            error: Exception to classify

        Returns:
            Error category for handling strategy
        """
        if isinstance(error, PulseBudgetError):
            return error.category
        if isinstance(error, (FileNotFoundError, PermissionError, IsADirectoryError)):
            return ErrorCategory.IO_ERROR
        if isinstance(error, OSError):
            return ErrorCategory.IO_ERROR
        if isinstance(error, ValueError):
            return ErrorCategory.VALIDATION_ERROR
        return ErrorCategory.UNKNOWN_ERROR

    @staticmethod
    def exit_code_for(error_category: ErrorCategory) -> int:
        """
        Map an error category to the CLI exit code.

        Verification failures get their own code so scripts can tell a
        numerical disagreement from a usage problem.
        """
        if error_category == ErrorCategory.VERIFICATION_ERROR:
            return EXIT_VERIFICATION
        return EXIT_USAGE

    @staticmethod
    def get_user_message(error_category: ErrorCategory, error: Exception) -> str:
        """
        Get user-friendly error message for category.

        Args:
            error_category: Error category
            error: The original exception

        Returns:
            User-friendly error message
        """
        prefixes = {
            ErrorCategory.PARSING_ERROR: "Could not parse input",
            ErrorCategory.VALIDATION_ERROR: "Invalid input",
            ErrorCategory.DOMAIN_ERROR: "Argument out of range",
            ErrorCategory.DESIGN_ERROR: "Pulse design failed",
            ErrorCategory.NUMERICAL_ERROR: "Numerical evaluation failed",
            ErrorCategory.VERIFICATION_ERROR: "Verification failed",
            ErrorCategory.CONFIGURATION_ERROR: "Configuration problem",
            ErrorCategory.IO_ERROR: "File access failed",
            ErrorCategory.UNKNOWN_ERROR: "Unexpected error",
        }
        return f"{prefixes.get(error_category, prefixes[ErrorCategory.UNKNOWN_ERROR])}: {error}"


def build_error_context(
    error: Exception, correlation_id: Optional[str] = None
) -> ErrorContext:
    """Create an ErrorContext for an exception."""
    category = ErrorClassifier.classify_error(error)
    return ErrorContext(
        error_category=category,
        original_error=error,
        correlation_id=correlation_id,
        user_message=ErrorClassifier.get_user_message(category, error),
        technical_details="".join(
            traceback.format_exception(type(error), error, error.__traceback__)
        ),
    )


@contextmanager
def error_handling_context(correlation_id: Optional[str] = None) -> Iterator[None]:
    """
    Context manager that logs any escaping error with its category.

    Args:
        correlation_id: Optional correlation ID for tracking

    Raises:
        The original exception, unchanged
    """
    try:
        yield
    except Exception as e:
        context = build_error_context(e, correlation_id)
        logger.error(
            f"{context.error_category.value}: {e} (correlation_id: {correlation_id})"
        )
        logger.debug(context.technical_details)
        raise
