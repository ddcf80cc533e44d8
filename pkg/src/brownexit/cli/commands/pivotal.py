"""Pivotal command - test unit-vector pairs against BS_d(rho Q) with the Beta pivotal statistic."""

import rich_click as click

from ...dataio import read_pair_csv
from ...models import BSParams
from ...stats.bs import bs_sample, pivotal_deciles, pivotal_statistic, pivotal_test
from ...stats.mathcore import RngStream
from ..core import UsageError, with_context, with_report
from ..display import format_pivotal
from ..logic.sampling import SAMPLE_STREAM, build_q
from .common import print_written

MIN_PIVOTAL_SIZE = 10


@click.command()
@click.argument("dataset", type=click.Path(dir_okay=False), required=False)
@click.option("--simulate", is_flag=True, help="Test a simulated BS sample instead of a dataset")
@click.option("--n", "n", type=click.IntRange(min=1), default=1000, show_default=True, help="Simulated sample size")
@click.option("--d", "dim", type=click.IntRange(min=2), default=2, show_default=True, help="Simulated dimension")
@click.option("--sim-rho", type=click.FloatRange(0, 1, max_open=True), default=None, help="rho of the simulated sample (default: --rho)")
@click.option("--rho", type=click.FloatRange(0, 1, max_open=True), required=True, help="rho under test")
@click.option("--q-angle", type=float, default=0.0, show_default=True, help="Rotation angle of Q (d = 2)")
@click.option("--det", type=click.Choice(["1", "-1"]), default="1", show_default=True, help="det Q (d = 2)")
@click.option("--q-file", type=click.Path(exists=True, dir_okay=False), default=None, help="CSV file with the d x d matrix Q")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None, help="JSON report file")
@with_context
@with_report("pivotal")
def pivotal(toolkit, report, dataset, simulate, n, dim, sim_rho, rho, q_angle, det, q_file, out):
    """KS test of T = (1 - x^2) / (1 - 2 rho x + rho^2), x = u'Qv, against Beta((d-1)/2, 1/2).

    DATASET is a CSV with header u1..ud,v1..vd; d is taken from the header.
    """
    if simulate == bool(dataset):
        raise UsageError("give either DATASET or --simulate")

    if simulate:
        q = build_q(dim, q_angle, det, q_file)
        truth = BSParams(rho if sim_rho is None else sim_rho, q)
        sample = bs_sample(truth, n, RngStream(toolkit.seed, SAMPLE_STREAM))
    else:
        sample = read_pair_csv(dataset)
        q = build_q(sample.d, q_angle, det, q_file)

    if sample.n < MIN_PIVOTAL_SIZE:
        raise UsageError(f"the pivotal test needs at least {MIN_PIVOTAL_SIZE} pairs, got {sample.n}")

    model = BSParams(rho, q)
    result = pivotal_test(sample, model)
    deciles = pivotal_deciles(pivotal_statistic(sample.u, sample.v, model), sample.d)
    format_pivotal(sample.n, sample.d, rho, result, deciles)

    if out:
        body = {
            "source": "simulated" if simulate else dataset,
            "n": sample.n,
            "d": sample.d,
            "rho": rho,
            "q": q,
            "ks_statistic": result.statistic,
            "pvalue": result.pvalue,
            "deciles": deciles,
        }
        if simulate:
            body["simulated_rho"] = truth.rho
        print_written(report.write(out, body))


# Export for lazy loading
cli = pivotal
