"""Sample command - draw from any implemented sampler."""

import rich_click as click

from ...dataio import write_csv
from ..core import with_context, with_report
from ..logic.sampling import SAMPLER_NAMES, build_params, describe_params, draw_sample
from .common import console, model_parameter_options, print_written


@click.command()
@click.argument("model", type=click.Choice(SAMPLER_NAMES))
@click.option("--n", "n", type=click.IntRange(min=1), required=True, help="Number of draws")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), required=True, help="Output CSV file")
@model_parameter_options
@with_context
@with_report("sample", timed=False)
def sample(toolkit, report, model, n, out, **options):
    """Draw a sample and write it as CSV, with a JSON sidecar of parameters and seed.

    Identical invocations produce byte-identical files.
    """
    params = build_params(model, options)
    header, columns = draw_sample(model, params, n, toolkit.seed)
    path = write_csv(out, header, columns)
    report.write(f"{path}.json", {"model": model, "n": n, "params": describe_params(params), "columns": header})

    console.print(f"{model}: {n} draws, columns {', '.join(header)}")
    print_written(path, "sample")


# Export for lazy loading
cli = sample
