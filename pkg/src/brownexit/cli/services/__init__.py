"""Service layer for CLI commands."""

from .report import ReportService

__all__ = ["ReportService"]
