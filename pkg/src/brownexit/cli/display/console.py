"""Shared console instance for rich output.

This module re-exports the consoles from commands.common.
"""

from ..commands.common import console, err_console

__all__ = ["console", "err_console"]
