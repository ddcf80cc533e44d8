"""Business logic behind the CLI commands."""
