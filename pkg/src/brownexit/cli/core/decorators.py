"""Dependency injection decorators for CLI commands."""

import logging
import sys
from functools import wraps

import rich_click as click

from ...config import ConfigError, setup_logging
from ..commands.common import print_failure
from .context import ToolkitContext
from .exceptions import as_toolkit_error
from .plugin_loader import ARGV_KEY

logger = logging.getLogger(__name__)


def _fail(error):
    print_failure(str(error))
    sys.exit(error.exit_code)


def with_context(f):
    """
    Inject the toolkit context, built from the root command's options on first use.

    Usage:
        @with_context
        def command(toolkit, ...):
            pass
    """
    @wraps(f)
    @click.pass_context
    def wrapper(ctx, *args, **kwargs):
        root = ctx.find_root()
        toolkit = root.obj if isinstance(root.obj, ToolkitContext) else None
        if toolkit is None:
            params = root.params
            try:
                toolkit = ToolkitContext.create(
                    params.get("config"),
                    seed=params.get("seed"),
                    workers=params.get("workers"),
                    verbose=bool(params.get("verbose")),
                )
            except ConfigError as e:
                _fail(as_toolkit_error(e))
            root.obj = toolkit
            setup_logging(toolkit.config, verbose=toolkit.verbose)
        return f(toolkit=toolkit, **kwargs)
    return wrapper


def with_report(name: str, timed: bool = True):
    """
    Inject a report service and translate library errors into exit codes.

    Must sit below ``@with_context``. Errors are printed on stderr and the process exits with
    1 (usage), 2 (data) or 3 (numerical failure).

    Args:
        name: Command name recorded in the report
        timed: Record the elapsed time in the report

    Usage:
        @with_context
        @with_report("fit")
        def command(toolkit, report, ...):
            pass
    """
    def decorator(f):
        @wraps(f)
        @click.pass_context
        def wrapper(ctx, *args, toolkit, **kwargs):
            from ..services.report import ReportService

            argv = ctx.meta.get(ARGV_KEY, sys.argv[1:])
            try:
                with ReportService(name, toolkit.seed, argv, timed=timed) as report:
                    return f(toolkit=toolkit, report=report, **kwargs)
            except Exception as e:
                error = as_toolkit_error(e)
                if error is None:
                    raise
                logger.debug(f"{name} failed", exc_info=True)
                _fail(error)
        return wrapper
    return decorator
