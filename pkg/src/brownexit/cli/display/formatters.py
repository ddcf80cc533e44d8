"""Output formatters for CLI."""

from ..commands.common import info_message, warning_message
from .console import console
from .tables import (
    _render_deciles_table,
    _render_fit_table,
    _render_study_table,
    _render_summary_table,
    _render_test_table,
)


def format_fit_summary(summary):
    """
    Display fitted models ranked by AIC, with failures listed last.

    Args:
        summary: FitSummary from the fit pipeline
    """
    rows = summary.ranking.rows() if summary.ranking else []
    console.print(_render_fit_table(rows, summary.failures, title=f"Model Fits (n = {summary.n})"))

    if summary.ranking:
        best_aic = summary.ranking.best.model
        best_bic = summary.ranking.by_bic[0].model
        console.print(f"\n[bold]Best by AIC:[/bold] [green]{best_aic}[/green]")
        if best_bic != best_aic:
            console.print(f"[bold]Best by BIC:[/bold] [yellow]{best_bic}[/yellow]")


def format_study(study):
    """
    Display the relative MSE table with published values in parentheses.

    Args:
        study: StudyTable
    """
    console.print(_render_study_table(study))
    boundary = sum(c.boundary for c in study.cells)
    if boundary:
        console.print(warning_message(f"MLE on the disc boundary in {boundary} replicate(s)"))


def format_pivotal(n, d, rho, result, deciles):
    console.print(_render_summary_table({"n": str(n), "d": str(d), "rho": rho}, title="Pivotal test"))
    console.print(_render_test_table({"KS vs Beta((d-1)/2, 1/2)": result}, title="Pivotal KS"))
    console.print(_render_deciles_table(deciles))


def format_oracle_report(report):
    """
    Display agreement of simulated exits with the closed-form model.

    Args:
        report: OracleReport
    """
    console.print(_render_summary_table(
        {
            "d": str(report.d),
            "rho": report.rho,
            "dt": report.dt,
            "paths": str(report.paths),
            "mean u'Qv": f"{report.mean_inner:.4f} +/- {report.mean_inner_se:.4f}",
        },
        title="Brownian oracle",
    ))

    tests = {"u'Qv KS": report.inner_ks, "outer exit marginal KS": report.outer_marginal_ks}
    if report.inner_chi_square is not None:
        tests["u'Qv histogram chi-square"] = report.inner_chi_square
    console.print(_render_test_table(tests, title="Oracle tests"))

    if report.bias is not None:
        bias = report.bias
        style = "green" if bias.within_model else "red"
        console.print(
            f"\n[bold]Step-size shift:[/bold] [{style}]{bias.shift:+.5f}[/{style}] "
            f"(predicted {bias.predicted:+.5f}, SE {bias.standard_error:.5f})"
        )


def format_gof_report(report):
    """
    Display goodness-of-fit tests and the density normalization check.

    Args:
        report: GofReport
    """
    console.print(_render_test_table(report.tests(), title=f"Goodness of Fit: {report.model} (n = {report.n})"))
    text = f"density integrates to {report.normalization:.8f}"
    if abs(report.normalization - 1) > 1e-6:
        console.print(warning_message(text))
    else:
        console.print(info_message(text))
