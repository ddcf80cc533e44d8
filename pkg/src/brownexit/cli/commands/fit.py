"""Fit command - maximum likelihood fits of the bivariate circular models with AIC/BIC ranking."""

import rich_click as click

from ...dataio import ingest_csv
from ...stats.circular_fits import MODEL_NAMES, FitOptions
from ..core import with_context, with_report
from ..display import format_fit_summary
from ..logic.fit_pipeline import parse_models, run_fits
from .common import print_written


@click.command()
@click.argument("dataset", type=click.Path(dir_okay=False))
@click.option(
    "--models",
    default=",".join(MODEL_NAMES),
    show_default=True,
    help="Comma-separated models to fit",
)
@click.option("--degrees", is_flag=True, help="Angles in the dataset are in degrees")
@click.option("--starts", type=click.IntRange(min=1), default=None, help="Multi-start count (default: fit.starts)")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None, help="JSON report file")
@with_context
@with_report("fit")
def fit(toolkit, report, dataset, models, degrees, starts, out):
    """Fit vm-copula, sengupta and shieh-johnson to a CSV of angle pairs.

    The dataset needs a `theta_u,theta_v` header. Models are ranked by AIC, BIC alongside.
    A model whose fit fails is reported and the others still run.
    """
    names = parse_models(models)
    data = ingest_csv(dataset, degrees=degrees)
    config = toolkit.config
    options = FitOptions(
        starts=starts or config.get("fit.starts"),
        max_iterations=config.get("fit.max_iterations"),
        grid_size=config.get("fit.grid_size"),
        seed=toolkit.seed,
    )

    summary = run_fits(data, names, options)
    format_fit_summary(summary)

    if out:
        body = {"dataset": str(data.source), "unit": data.unit.value, "models": names}
        body.update(summary.to_dict())
        print_written(report.write(out, body))


# Export for lazy loading
cli = fit
