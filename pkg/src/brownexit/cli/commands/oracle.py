"""Oracle command - simulate Brownian exits and compare them with the closed-form model."""

import rich_click as click

from ...models import PathConfig
from ...stats.oracle import oracle_compare
from ..core import UsageError, with_context, with_report
from ..display import format_oracle_report
from ..logic.sampling import build_q
from .common import FLOATS, print_written


@click.command()
@click.option("--d", "dim", type=click.IntRange(min=2), default=2, show_default=True, help="Dimension")
@click.option("--rho", type=click.FloatRange(0, 1, min_open=True, max_open=True), required=True, help="Radius of the inner sphere")
@click.option("--q-angle", type=float, default=0.0, show_default=True, help="Rotation angle of Q (d = 2)")
@click.option("--det", type=click.Choice(["1", "-1"]), default="1", show_default=True, help="det Q (d = 2)")
@click.option("--q-file", type=click.Path(exists=True, dir_okay=False), default=None, help="CSV file with the d x d matrix Q")
@click.option("--start", type=FLOATS, default=None, help="Start point, e.g. 0.2,0 (default: origin)")
@click.option("--dt", type=float, default=None, help="Euler step (default: oracle.dt)")
@click.option("--paths", type=click.IntRange(min=2), default=20_000, show_default=True, help="Number of paths")
@click.option("--bias-paths", type=click.IntRange(min=0), default=0, show_default=True, help="Coupled paths for the step-size check")
@click.option("--chunk-size", type=click.IntRange(min=1), default=None, help="Paths per work unit (default: oracle.chunk_size)")
@click.option("--max-steps", type=click.IntRange(min=1), default=None, help="Step cap per path (default: oracle.max_steps)")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None, help="JSON report file")
@with_context
@with_report("oracle")
def oracle(toolkit, report, dim, rho, q_angle, det, q_file, start, dt, paths, bias_paths, chunk_size, max_steps, out):
    """Run Brownian paths from the start point to the inner sphere, then to the unit sphere.

    The two exit points give the pair (u, v), which is tested against the model: the law of
    u'Qv, the exit law of v and, for d = 2, a chi-square over u'Qv. For a fixed --chunk-size
    results do not depend on --workers.
    """
    config = toolkit.config
    if start is not None and len(start) != dim:
        raise UsageError(f"--start needs {dim} coordinates, got {len(start)}")

    cfg = PathConfig(
        d=dim,
        rho=rho,
        q=build_q(dim, q_angle, det, q_file),
        start=start,
        dt=dt or config.get("oracle.dt"),
        max_steps=max_steps or config.get("oracle.max_steps"),
    )
    result = oracle_compare(
        cfg,
        paths,
        toolkit.seed,
        workers=toolkit.workers,
        chunk_size=chunk_size or config.get("oracle.chunk_size"),
        bias_paths=bias_paths,
    )
    format_oracle_report(result)

    if out:
        print_written(report.write(out, result.to_dict()))


# Export for lazy loading
cli = oracle
