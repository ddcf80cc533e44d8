"""Custom CLI exceptions and their exit codes."""

from ...config import ConfigError
from ...dataio import DatasetError
from ...stats.mathcore import DomainError, NumericalError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class ToolkitError(Exception):
    """Base exception for brownexit CLI errors."""
    exit_code = EXIT_USAGE


class UsageError(ToolkitError):
    """Raised for invalid options, parameters or model names."""
    exit_code = EXIT_USAGE


class DataError(ToolkitError):
    """Raised when an input file cannot be used."""
    exit_code = EXIT_DATA


class NumericalFailure(ToolkitError):
    """Raised when a computation fails to produce a trustworthy number."""
    exit_code = EXIT_NUMERICAL


def as_toolkit_error(error: Exception):
    """Map a library exception onto its CLI counterpart, or None if it is not one of ours."""
    if isinstance(error, ToolkitError):
        return error
    if isinstance(error, (DomainError, ConfigError)):
        return UsageError(str(error))
    if isinstance(error, DatasetError):
        return DataError(str(error))
    if isinstance(error, NumericalError):
        return NumericalFailure(f"{type(error).__name__}: {error}")
    return None
