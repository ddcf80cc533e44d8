"""Display layer for CLI output."""

from .console import console, err_console
from .formatters import format_fit_summary, format_gof_report, format_oracle_report, format_pivotal, format_study
from .tables import (
    _render_deciles_table,
    _render_fit_table,
    _render_study_table,
    _render_summary_table,
    _render_test_table,
)

__all__ = [
    "console",
    "err_console",
    "format_fit_summary",
    "format_gof_report",
    "format_oracle_report",
    "format_pivotal",
    "format_study",
    "_render_fit_table",
    "_render_study_table",
    "_render_test_table",
    "_render_deciles_table",
    "_render_summary_table",
]
