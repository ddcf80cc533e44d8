"""Shared utilities and conventions for CLI commands.

Data reports go to files; the console carries tables and summaries on stdout and errors on
stderr.
"""

from typing import List, Optional

import rich_click as click
from rich.console import Console

# Shared console instances for consistent CLI output formatting
console = Console()
err_console = Console(stderr=True)

# Color scheme
COLOR_SUCCESS = "green"
COLOR_ERROR = "red"
COLOR_WARNING = "yellow"
COLOR_INFO = "cyan"
COLOR_DIM = "dim"

# Symbols
SYMBOL_SUCCESS = "✓"
SYMBOL_ERROR = "✗"
SYMBOL_WARNING = "⚠"
SYMBOL_INFO = "ℹ"

PREFIX_SUCCESS = f"[{COLOR_SUCCESS}]{SYMBOL_SUCCESS}[/{COLOR_SUCCESS}]"
PREFIX_ERROR = f"[{COLOR_ERROR}]{SYMBOL_ERROR}[/{COLOR_ERROR}]"
PREFIX_WARNING = f"[{COLOR_WARNING}]{SYMBOL_WARNING}[/{COLOR_WARNING}]"
PREFIX_INFO = f"[{COLOR_INFO}]{SYMBOL_INFO}[/{COLOR_INFO}]"


def success_message(text: str) -> str:
    """Format a success message with standard styling."""
    return f"{PREFIX_SUCCESS} {text}"


def error_message(text: str) -> str:
    """Format an error message with standard styling."""
    return f"{PREFIX_ERROR} {text}"


def warning_message(text: str) -> str:
    """Format a warning message with standard styling."""
    return f"{PREFIX_WARNING} {text}"


def info_message(text: str) -> str:
    """Format an info message with standard styling."""
    return f"{PREFIX_INFO} {text}"


def print_failure(text: str) -> None:
    err_console.print(error_message(text), highlight=False)


def print_written(path, what: str = "report") -> None:
    console.print(success_message(f"Wrote {what} to {path}"), highlight=False)


def verdict(pvalue: Optional[float], level: float = 0.01) -> str:
    """Colored pass/fail label for a p-value at ``level``."""
    if pvalue is None:
        return f"[{COLOR_DIM}]n/a[/{COLOR_DIM}]"
    if pvalue > level:
        return f"[{COLOR_SUCCESS}]pass[/{COLOR_SUCCESS}]"
    return f"[{COLOR_ERROR}]reject[/{COLOR_ERROR}]"


class FloatList(click.ParamType):
    """Comma-separated floats, e.g. ``0.2,0``."""

    name = "floats"

    def convert(self, value, param, ctx) -> List[float]:
        if isinstance(value, (list, tuple)):
            return [float(v) for v in value]
        try:
            return [float(v) for v in str(value).split(",") if v.strip()]
        except ValueError:
            self.fail(f"{value!r} is not a comma-separated list of numbers", param, ctx)


class IntList(click.ParamType):
    """Comma-separated integers, e.g. ``10,20,30``."""

    name = "ints"

    def convert(self, value, param, ctx) -> List[int]:
        if isinstance(value, (list, tuple)):
            return [int(v) for v in value]
        try:
            return [int(v) for v in str(value).split(",") if v.strip()]
        except ValueError:
            self.fail(f"{value!r} is not a comma-separated list of integers", param, ctx)


FLOATS = FloatList()
INTS = IntList()

MODEL_PARAMETER_OPTIONS = [
    click.option("--psi-abs", type=click.FloatRange(0, 1, max_open=True), default=None, help="|psi| of the BC parameter"),
    click.option("--psi-arg", type=float, default=0.0, show_default=True, help="arg(psi) in radians"),
    click.option("--rho", type=click.FloatRange(0, 1, max_open=True), default=None, help="Dependence rho of BS models"),
    click.option("--d", "dim", type=click.IntRange(min=2), default=2, show_default=True, help="Dimension of the unit vectors"),
    click.option("--q-angle", type=float, default=0.0, show_default=True, help="Rotation angle of Q (d = 2)"),
    click.option("--det", type=click.Choice(["1", "-1"]), default="1", show_default=True, help="det Q (d = 2)"),
    click.option("--q-file", type=click.Path(exists=True, dir_okay=False), default=None, help="CSV file with the d x d matrix Q"),
    click.option("--xi", type=FLOATS, default=None, help="Start point of the shifted model, e.g. 0.2,0"),
    click.option("--alpha1-abs", type=click.FloatRange(0, 1, max_open=True), default=0.0, help="|alpha1| of the Mobius-marginal model"),
    click.option("--alpha1-arg", type=float, default=0.0, help="arg(alpha1)"),
    click.option("--alpha2-abs", type=click.FloatRange(0, 1, max_open=True), default=0.0, help="|alpha2|"),
    click.option("--alpha2-arg", type=float, default=0.0, help="arg(alpha2)"),
    click.option("--mu1", type=float, default=None, help="Mean direction of the first von Mises marginal"),
    click.option("--mu2", type=float, default=None, help="Mean direction of the second von Mises marginal"),
    click.option("--mu3", type=float, default=None, help="Link direction (shieh-johnson)"),
    click.option("--kappa1", type=click.FloatRange(min=0), default=None, help="Concentration of the first marginal"),
    click.option("--kappa2", type=click.FloatRange(min=0), default=None, help="Concentration of the second marginal"),
    click.option("--kappa3", type=click.FloatRange(min=0), default=None, help="Link concentration (shieh-johnson)"),
    click.option("--m", "m_entries", type=FLOATS, default=None, help="m12,m13,m21,m22,m23,m31,m32,m33 (sengupta)"),
    click.option("--preset", default=None, help="Named von Mises copula parameter set"),
]


def model_parameter_options(f):
    """Attach the shared model-parameter options; values arrive as keyword arguments."""
    for option in reversed(MODEL_PARAMETER_OPTIONS):
        f = option(f)
    return f


__all__ = [
    "console",
    "err_console",
    "COLOR_SUCCESS",
    "COLOR_ERROR",
    "COLOR_WARNING",
    "COLOR_INFO",
    "COLOR_DIM",
    "PREFIX_SUCCESS",
    "PREFIX_ERROR",
    "PREFIX_WARNING",
    "PREFIX_INFO",
    "success_message",
    "error_message",
    "warning_message",
    "info_message",
    "print_failure",
    "print_written",
    "verdict",
    "FLOATS",
    "INTS",
    "model_parameter_options",
]
