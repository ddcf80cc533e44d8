"""Core CLI infrastructure."""

from .context import ToolkitContext
from .decorators import with_context, with_report
from .exceptions import (
    DataError,
    NumericalFailure,
    ToolkitError,
    UsageError,
)
from .plugin_loader import BrownexitGroup

__all__ = [
    # Context
    "ToolkitContext",
    # Decorators
    "with_context",
    "with_report",
    # Exceptions
    "ToolkitError",
    "UsageError",
    "DataError",
    "NumericalFailure",
    # Plugin loader
    "BrownexitGroup",
]
