"""Plugin loader for lazy command loading, aliases, and global options."""

import importlib
import os
import sys
from typing import Optional

import rich_click as click
from rich_click import RichGroup

from .exceptions import EXIT_USAGE

ARGV_KEY = "brownexit.argv"


class LazyCommandGroup(click.Group):
    """Group that loads commands lazily from a directory."""

    def __init__(self, *args, commands_package: str = None, **kwargs):
        super().__init__(*args, **kwargs)
        self.commands_package = commands_package or 'brownexit.cli.commands'

    def list_commands(self, ctx):
        """
        List all available commands by discovering Python files in the commands package.

        Returns:
            List of command names
        """
        rv = []

        try:
            package = importlib.import_module(self.commands_package)
            commands_dir = os.path.dirname(package.__file__)

            for filename in os.listdir(commands_dir):
                if filename.endswith('.py') and not filename.startswith('__') and filename != 'common.py':
                    rv.append(filename[:-3])

        except (ImportError, AttributeError, FileNotFoundError):
            pass

        if self.commands:
            for name in self.commands:
                if name not in rv:
                    rv.append(name)

        rv.sort()
        return rv

    def get_command(self, ctx, name):
        """
        Import and return a command by name.

        Args:
            ctx: Click context
            name: Command name

        Returns:
            Click command or None if not found
        """
        if name in self.commands:
            return self.commands[name]
        if name == 'common':
            return None

        try:
            mod = importlib.import_module(f'{self.commands_package}.{name}')
        except ImportError:
            return None
        return getattr(mod, 'cli', None)


class AliasedGroup(click.Group):
    """Group that supports command aliases."""

    def __init__(self, *args, aliases: Optional[dict] = None, **kwargs):
        super().__init__(*args, **kwargs)
        self.aliases = aliases or {
            'sim': 'simstudy',
            'gf': 'gof',
        }

    def get_command(self, ctx, cmd_name):
        """
        Get command by name, resolving aliases.

        Args:
            ctx: Click context
            cmd_name: Command name or alias

        Returns:
            Click command or None
        """
        resolved_name = self.aliases.get(cmd_name, cmd_name)
        return super().get_command(ctx, resolved_name)

    def aliases_for(self, name: str) -> list:
        return sorted(alias for alias, target in self.aliases.items() if target == name)

    def format_commands(self, ctx, formatter):
        """
        Format the command list for help output, with aliases beside each command.

        Args:
            ctx: Click context
            formatter: Help formatter
        """
        rows = []
        for name in self.list_commands(ctx):
            cmd = self.get_command(ctx, name)
            if cmd is None or cmd.hidden:
                continue

            aliases = self.aliases_for(name)
            label = f"{name} ({', '.join(aliases)})" if aliases else name
            rows.append((label, cmd.get_short_help_str(limit=formatter.width)))

        if rows:
            with formatter.section('Commands'):
                formatter.write_dl(rows)


def _store_global_option(ctx, param, value):
    """
    Callback to store global option values in the root context.

    Values given after the subcommand are read by the context decorator at run time, so
    ``brownexit --seed 1 sample ...`` and ``brownexit sample --seed 1 ...`` behave the same.
    """
    if value is not None and value is not False and not ctx.resilient_parsing:
        root_ctx = ctx.find_root()
        root_ctx.params[param.name] = value


class BrownexitGroup(LazyCommandGroup, AliasedGroup, RichGroup):
    """
    Combined group with lazy loading, aliases, and global options support.

    Usage errors exit with status 1, matching the toolkit's exit-code table.
    """

    GLOBAL_OPTIONS = [
        click.Option(
            ['-c', '--config'],
            default=None,
            help='Path to config file (or set BROWNEXIT_CONFIG)',
            expose_value=False,
            is_eager=True,
            callback=_store_global_option,
        ),
        click.Option(
            ['--seed'],
            type=click.IntRange(min=0),
            default=None,
            help='Master seed (default: defaults.seed)',
            expose_value=False,
            is_eager=True,
            callback=_store_global_option,
        ),
        click.Option(
            ['--workers'],
            type=click.IntRange(min=1),
            default=None,
            help='Worker processes (default: defaults.workers)',
            expose_value=False,
            is_eager=True,
            callback=_store_global_option,
        ),
        click.Option(
            ['-v', '--verbose'],
            is_flag=True,
            default=False,
            help='Debug logging',
            expose_value=False,
            is_eager=True,
            callback=_store_global_option,
        ),
    ]

    def __init__(self, *args, commands_package: str = None, aliases: Optional[dict] = None, **kwargs):
        LazyCommandGroup.__init__(self, *args, commands_package=commands_package, **kwargs)
        AliasedGroup.__init__(self, *args, aliases=aliases, **kwargs)

    def get_command(self, ctx, cmd_name):
        """Get command with alias resolution, lazy loading, and global options."""
        resolved_name = self.aliases.get(cmd_name, cmd_name)
        cmd = LazyCommandGroup.get_command(self, ctx, resolved_name)

        if cmd is not None:
            cmd = self._add_global_options(cmd)

        return cmd

    def _add_global_options(self, cmd):
        for global_opt in self.GLOBAL_OPTIONS:
            if not any(p.name == global_opt.name for p in cmd.params):
                cmd.params.insert(0, global_opt)
        return cmd

    def make_context(self, info_name, args, parent=None, **extra):
        argv = list(args)
        ctx = super().make_context(info_name, args, parent=parent, **extra)
        ctx.meta[ARGV_KEY] = argv
        return ctx

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            rv = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
        except click.ClickException as e:
            e.show()
            sys.exit(EXIT_USAGE)
        except click.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(EXIT_USAGE)

        if not standalone_mode:
            return rv
        sys.exit(rv if isinstance(rv, int) else 0)
