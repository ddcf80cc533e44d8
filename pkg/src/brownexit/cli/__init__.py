"""Brownexit CLI - Brownian-exit bivariate distributions for pairs of unit vectors."""

# Configure rich-click BEFORE importing click
import rich_click as click

# Enable rich-click formatting
click.rich_click.USE_RICH_MARKUP = True
click.rich_click.SHOW_ARGUMENTS = True
click.rich_click.GROUP_ARGUMENTS_OPTIONS = True
click.rich_click.MAX_WIDTH = 100

from .. import __version__  # noqa: E402
from .core import BrownexitGroup  # noqa: E402
from .core.plugin_loader import _store_global_option  # noqa: E402


@click.group(
    cls=BrownexitGroup,
    commands_package='brownexit.cli.commands',
    context_settings=dict(
        help_option_names=['-h', '--help'],
    ),
)
@click.version_option(version=__version__, help='Show the version and exit.')
@click.option(
    '-c',
    '--config',
    default=None,
    help='Path to config file (or set BROWNEXIT_CONFIG)',
    expose_value=False,
    callback=_store_global_option,
)
@click.option(
    '--seed',
    type=click.IntRange(min=0),
    default=None,
    help='Master seed (default: defaults.seed)',
    expose_value=False,
    callback=_store_global_option,
)
@click.option(
    '--workers',
    type=click.IntRange(min=1),
    default=None,
    help='Worker processes (default: defaults.workers)',
    expose_value=False,
    callback=_store_global_option,
)
@click.option(
    '-v',
    '--verbose',
    is_flag=True,
    default=False,
    help='Debug logging',
    expose_value=False,
    callback=_store_global_option,
)
@click.pass_context
def cli(ctx, config=None, seed=None, workers=None, verbose=False):
    """Sample, fit and test Brownian-exit models for pairs of directions.

    Every command is deterministic given --seed. Reports are JSON, data files CSV.
    Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
    """
    # The toolkit context is built on first use by @with_context, after subcommand options
    # have been parsed.
    ctx.ensure_object(dict)


def main():
    cli()


if __name__ == '__main__':
    main()
