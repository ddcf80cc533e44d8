"""Application context for CLI."""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ...config import Config


@dataclass
class ToolkitContext:
    """Shared application context passed through Click commands."""

    config: Config
    config_path: Optional[Path]
    seed: int
    workers: int
    verbose: bool = False

    @classmethod
    def create(
        cls,
        config_path: Optional[str] = None,
        seed: Optional[int] = None,
        workers: Optional[int] = None,
        verbose: bool = False,
    ):
        """
        Factory method to create context from command-line values.

        Options given on the command line win over the config file.

        Args:
            config_path: Explicit config file, or None to search the usual places
            seed: Master seed override
            workers: Worker process override
            verbose: Force DEBUG logging

        Returns:
            ToolkitContext instance

        Raises:
            ConfigError: If config is invalid
        """
        config = Config.resolve(config_path)

        return cls(
            config=config,
            config_path=config.config_path,
            seed=int(seed if seed is not None else config.get("defaults.seed")),
            workers=int(workers if workers is not None else config.get("defaults.workers")),
            verbose=verbose,
        )
