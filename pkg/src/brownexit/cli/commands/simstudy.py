"""Simstudy command - relative MSE of the moment estimator against the MLE under BC+."""

import rich_click as click

from ...dataio import write_csv
from ...models import StudyGrid
from ..core import with_context, with_report
from ..display import format_study
from ..logic.simstudy import run_study
from .common import FLOATS, INTS, print_written


@click.command()
@click.option("--sample-sizes", type=INTS, default=None, help="Comma-separated n values (default: simstudy.sample_sizes)")
@click.option("--psi-values", type=FLOATS, default=None, help="Comma-separated psi values (default: simstudy.psi_values)")
@click.option("--replicates", type=click.IntRange(min=1), default=None, help="Samples per cell (default: simstudy.replicates)")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), required=True, help="Output CSV table")
@with_context
@with_report("simstudy")
def simstudy(toolkit, report, sample_sizes, psi_values, replicates, out):
    """Monte Carlo comparison of the moment estimator and the MLE of psi.

    Writes one row per n plus the analytic n = inf row, one column per psi, and a JSON
    sidecar with per-cell MSEs and the deviation from the published values.
    Results depend on --seed only, not on --workers.
    """
    config = toolkit.config
    grid = StudyGrid(
        sample_sizes=sample_sizes or config.get("simstudy.sample_sizes"),
        psi_values=psi_values or config.get("simstudy.psi_values"),
        replicates=replicates or config.get("simstudy.replicates"),
        seed=toolkit.seed,
    )

    study = run_study(grid, workers=toolkit.workers)
    format_study(study)

    header, columns = study.csv_columns()
    path = write_csv(out, header, columns)
    report.write(f"{path}.json", study.to_dict())
    print_written(path, "table")


# Export for lazy loading
cli = simstudy
