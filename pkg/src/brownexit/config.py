"""Configuration management."""

import copy
import logging
import os
import sys
from pathlib import Path
from typing import Optional

import yaml

ENV_VAR = "BROWNEXIT_CONFIG"
DEFAULT_FILENAME = "brownexit.yaml"

DEFAULTS = {
    "logging": {"level": "WARNING", "file": None},
    "defaults": {"seed": 20240607, "workers": 1},
    "simstudy": {
        "sample_sizes": [10, 20, 30, 50, 100],
        "psi_values": [0.1, 0.3, 0.5, 0.7, 0.9],
        "replicates": 2000,
    },
    "oracle": {"dt": 1e-5, "max_steps": 5_000_000, "chunk_size": 1024},
    "fit": {"starts": 5, "grid_size": 128, "max_iterations": 4000},
}

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


class ConfigError(Exception):
    """Configuration error."""
    pass


def _merge(base: dict, override: dict) -> dict:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


class Config:
    """Configuration container.

    Values from the YAML file are layered over the built-in defaults, so every key is optional.
    """

    def __init__(self, config_path: Optional[str] = None):
        """Load configuration from a YAML file.

        Args:
            config_path: Path to a YAML file, or None for built-in defaults only

        Raises:
            ConfigError: If the file is missing, unreadable or invalid
        """
        self.config_path = Path(config_path) if config_path else None
        user_data = {}

        if self.config_path is not None:
            if not self.config_path.exists():
                raise ConfigError(
                    f"Config file not found: {config_path}\n"
                    "Copy config.example.yaml to brownexit.yaml and adjust it."
                )
            try:
                with open(self.config_path) as f:
                    user_data = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                raise ConfigError(f"Invalid YAML in config file: {e}")
            if not isinstance(user_data, dict):
                raise ConfigError("Config file must contain a mapping at the top level")

        self.data = _merge(DEFAULTS, user_data)
        self._validate()

    @classmethod
    def defaults(cls) -> "Config":
        return cls(None)

    @classmethod
    def resolve(cls, explicit: Optional[str] = None) -> "Config":
        """Load the config from ``--config``, then $BROWNEXIT_CONFIG, then ./brownexit.yaml."""
        if explicit:
            return cls(explicit)
        env_path = os.environ.get(ENV_VAR)
        if env_path:
            return cls(env_path)
        if Path(DEFAULT_FILENAME).exists():
            return cls(DEFAULT_FILENAME)
        return cls.defaults()

    def _validate(self):
        """Validate value types and ranges."""
        level = str(self.get("logging.level", "WARNING")).upper()
        if level not in LOG_LEVELS:
            raise ConfigError(f"logging.level must be one of {', '.join(LOG_LEVELS)}, got {level}")

        for key, minimum in (
            ("defaults.seed", 0),
            ("defaults.workers", 1),
            ("simstudy.replicates", 1),
            ("oracle.max_steps", 1),
            ("oracle.chunk_size", 1),
            ("fit.starts", 1),
            ("fit.grid_size", 8),
            ("fit.max_iterations", 1),
        ):
            value = self.get(key)
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(f"{key} must be an integer, got {value!r}")
            if value < minimum:
                raise ConfigError(f"{key} must be >= {minimum}")

        dt = self.get("oracle.dt")
        if not isinstance(dt, (int, float)) or not 0 < dt <= 1e-3:
            raise ConfigError(f"oracle.dt must lie in (0, 1e-3], got {dt!r}")

        sizes = self.get("simstudy.sample_sizes")
        if not isinstance(sizes, list) or not sizes or any(not isinstance(n, int) or n < 1 for n in sizes):
            raise ConfigError("simstudy.sample_sizes must be a non-empty list of positive integers")

        psis = self.get("simstudy.psi_values")
        if not isinstance(psis, list) or not psis or any(
            not isinstance(p, (int, float)) or not 0 <= p < 1 for p in psis
        ):
            raise ConfigError("simstudy.psi_values must be a non-empty list of values in [0, 1)")

    def get(self, key: str, default=None):
        """Get config value by dot-notation key.

        Args:
            key: Dot-notation key (e.g., 'simstudy.replicates')
            default: Default value if not found

        Returns:
            Config value or default
        """
        keys = key.split(".")
        value = self.data

        for k in keys:
            if isinstance(value, dict):
                value = value.get(k)
            else:
                return default

            if value is None:
                return default

        return value


def setup_logging(config: Config, verbose: bool = False):
    """Setup logging configuration.

    Console records go to stderr; stdout is reserved for command output.

    Args:
        config: Config object
        verbose: Force DEBUG level
    """
    log_level_str = "DEBUG" if verbose else str(config.get("logging.level", "WARNING")).upper()
    log_level = getattr(logging, log_level_str, logging.WARNING)
    log_file = config.get("logging.file")

    handlers = []

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(log_level)
    console_formatter = logging.Formatter(
        "%(asctime)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )
    console_handler.setFormatter(console_formatter)
    handlers.append(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(log_level)
        file_formatter = logging.Formatter(
            "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
        )
        file_handler.setFormatter(file_formatter)
        handlers.append(file_handler)

    logging.basicConfig(
        level=log_level,
        handlers=handlers,
        force=True,
    )
