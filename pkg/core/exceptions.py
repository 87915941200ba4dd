"""
Exception hierarchy and command error handling
"""

from django.core.management.base import CommandError
from rest_framework import serializers
import logging

logger = logging.getLogger(__name__)

EXIT_SUCCESS = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_CAPACITY = 4


class SupportRecoveryException(Exception):
    """Base exception for the sparse support recovery toolkit"""
    exit_code = EXIT_USAGE


class DomainError(SupportRecoveryException, ValueError):
    """Input outside the mathematical domain of an operation"""
    exit_code = EXIT_USAGE


class UsageError(SupportRecoveryException):
    """Malformed flags, config file or sweep description"""
    exit_code = EXIT_USAGE


class NumericError(SupportRecoveryException, ArithmeticError):
    """Quadrature failure or a degenerate denominator"""
    exit_code = EXIT_NUMERIC

    def __init__(self, message, achieved_error=None):
        super().__init__(message)
        self.achieved_error = achieved_error


class CapacityError(SupportRecoveryException):
    """Exhaustive enumeration larger than the configured cap"""
    exit_code = EXIT_CAPACITY

    def __init__(self, requested, cap):
        super().__init__(
            f"Enumeration of {requested} supports exceeds the cap of {cap}"
        )
        self.requested = requested
        self.cap = cap


def command_exception_handler(exc):
    """
    Convert a toolkit exception into a CommandError with a stable exit code

    Returns:
        CommandError to raise, or None when the exception is not ours
    """
    if isinstance(exc, serializers.ValidationError):
        logger.warning(f"Validation error: {exc.detail}")
        return CommandError(f"Invalid parameters: {format_validation_detail(exc.detail)}",
                            returncode=EXIT_USAGE)

    if isinstance(exc, SupportRecoveryException):
        if exc.exit_code == EXIT_USAGE:
            logger.warning(f"{exc.__class__.__name__}: {exc}")
        else:
            logger.error(f"{exc.__class__.__name__}: {exc}")
        return CommandError(str(exc), returncode=exc.exit_code)

    return None


def format_validation_detail(detail):
    """Flatten DRF error detail into one line"""
    if isinstance(detail, dict):
        return '; '.join(
            f"{field}: {format_validation_detail(value)}" for field, value in detail.items()
        )
    if isinstance(detail, (list, tuple)):
        return ', '.join(format_validation_detail(item) for item in detail)
    return str(detail)
