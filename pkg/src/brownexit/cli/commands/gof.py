"""Gof command - goodness of fit of an angle dataset against a model density."""

import json
from pathlib import Path

import rich_click as click

from ...dataio import ingest_csv
from ..core import DataError, with_context, with_report
from ..display import format_gof_report
from ..logic.gof import angular_model, angular_model_from_fit, fit_from_report, run_gof
from ..logic.sampling import ANGULAR_NAMES, build_params, describe_params
from .common import model_parameter_options, print_written


@click.command()
@click.argument("dataset", type=click.Path(dir_okay=False))
@click.argument("model", type=click.Choice(ANGULAR_NAMES))
@click.option("--degrees", is_flag=True, help="Angles in the dataset are in degrees")
@click.option("--bins", type=click.IntRange(min=2), default=None, help="Histogram bins per axis (default: from n)")
@click.option(
    "--from-fit",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Take the parameters of MODEL from a fit report",
)
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None, help="JSON report file")
@model_parameter_options
@with_context
@with_report("gof")
def gof(toolkit, report, dataset, model, degrees, bins, from_fit, out, **options):
    """Marginal KS tests, a 2-D histogram chi-square and, for BC-based models, the KS test of
    the reduction to C*(psi).

    The report also carries the numerical integral of the density over the torus.
    """
    data = ingest_csv(dataset, degrees=degrees)

    if from_fit:
        try:
            fit_report = json.loads(Path(from_fit).read_text())
        except json.JSONDecodeError as e:
            raise DataError(f"{from_fit} is not a JSON report: {e}")
        fit = fit_from_report(fit_report, model)
        view = angular_model_from_fit(fit)
        params = fit.params
    else:
        built = build_params(model, options)
        view = angular_model(model, built)
        params = describe_params(built)

    result = run_gof(data, view, bins)
    format_gof_report(result)

    if out:
        body = {"dataset": str(data.source), "params": params}
        body.update(result.to_dict())
        print_written(report.write(out, body))


# Export for lazy loading
cli = gof
