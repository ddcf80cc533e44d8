"""Table builders for CLI output.

Conventions:
- Functions named _render_*_table() for consistency
- Header style: "bold cyan"
- Primary column (first) styled as "bold"
"""

import math

from rich.table import Table

from ..commands.common import verdict


def _fmt(value, digits: int = 4) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "N/A"
    return f"{value:.{digits}g}"


def _render_fit_table(rows, failures=None, title="Model Fits"):
    """
    Create table for a model ranking.

    Args:
        rows: Ranking rows (rank, model, loglik, aic, bic, bic_rank, k, n, converged)
        failures: Mapping of model name to failure message
        title: Table title

    Returns:
        Rich Table object
    """
    table = Table(title=title, header_style="bold cyan")
    table.add_column("Model", style="bold")
    table.add_column("k", justify="right")
    table.add_column("log L", justify="right")
    table.add_column("AIC", justify="right")
    table.add_column("BIC", justify="right")
    table.add_column("AIC rank", justify="right")
    table.add_column("BIC rank", justify="right")
    table.add_column("Status")

    for row in rows:
        status = "[green]converged[/green]" if row["converged"] else "[yellow]not converged[/yellow]"
        table.add_row(
            row["model"],
            str(row["k"]),
            f"{row['loglik']:.1f}",
            f"{row['aic']:.1f}",
            f"{row['bic']:.1f}",
            str(row["rank"]),
            str(row["bic_rank"]),
            status,
        )

    for model, message in (failures or {}).items():
        table.add_row(model, "", "", "", "", "", "", f"[red]FAILED[/red] {message}")

    return table


def _render_study_table(study, title="Relative MSE of moment estimator vs MLE"):
    """
    Create table for the simulation study: one row per n, one column per psi.

    Args:
        study: StudyTable
        title: Table title

    Returns:
        Rich Table object
    """
    from ..logic.simstudy import reference_value

    table = Table(title=title, header_style="bold cyan")
    table.add_column("n", style="bold", justify="right")
    for psi in study.grid.psi_values:
        table.add_column(f"psi={psi:g}", justify="right")

    for n, ratios in study.ratio_rows():
        cells = []
        for psi, ratio in zip(study.grid.psi_values, ratios):
            published = reference_value(n, psi)
            text = f"{ratio:.3f}"
            if published is not None:
                text += f" [dim]({published:.3f})[/dim]"
            cells.append(text)
        table.add_row("inf" if math.isinf(n) else str(n), *cells)

    return table


def _render_test_table(tests, title="Goodness of Fit", level=0.01):
    """
    Create table for a set of hypothesis tests.

    Args:
        tests: Mapping of test name to TestResult
        title: Table title
        level: Significance level of the verdict column

    Returns:
        Rich Table object
    """
    table = Table(title=title, header_style="bold cyan")
    table.add_column("Test", style="bold")
    table.add_column("Statistic", justify="right")
    table.add_column("p-value", justify="right")
    table.add_column(f"Verdict ({level:g})")

    for name, result in tests.items():
        table.add_row(name, _fmt(result.statistic), _fmt(result.pvalue), verdict(result.pvalue, level))

    return table


def _render_deciles_table(deciles, title="Pivotal deciles"):
    table = Table(title=title, header_style="bold cyan")
    table.add_column("p", style="bold", justify="right")
    table.add_column("Empirical", justify="right")
    table.add_column("Beta", justify="right")

    for row in deciles:
        table.add_row(f"{row['p']:.1f}", f"{row['empirical']:.4f}", f"{row['beta']:.4f}")

    return table


def _render_summary_table(fields, title=None):
    """Two-column key/value table."""
    table = Table(title=title, show_header=False)
    table.add_column("Field", style="bold")
    table.add_column("Value")

    for key, value in fields.items():
        table.add_row(key, value if isinstance(value, str) else _fmt(value, 6))

    return table
