"""Report service with context manager support."""

import logging
import time
from pathlib import Path
from typing import Optional, Sequence

from ... import __version__
from ...dataio import write_json

logger = logging.getLogger(__name__)


class ReportService:
    """
    Collects the run metadata every JSON report carries.

    Provides timing of the wrapped command and writing of the report envelope.
    """

    def __init__(self, command: str, seed: int, argv: Sequence[str], timed: bool = True):
        """
        Initialize report service.

        Args:
            command: Command name
            seed: Master seed of the run
            argv: Command-line arguments as given
            timed: Include the elapsed time in written reports
        """
        self.command = command
        self.seed = seed
        self.argv = list(argv)
        self.timed = timed
        self._started: Optional[float] = None
        self.elapsed: Optional[float] = None

    def __enter__(self):
        """Enter context manager - start the clock."""
        self._started = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        """Exit context manager - stop the clock."""
        self.elapsed = self.seconds()
        logger.info(f"{self.command} finished in {self.elapsed:.2f}s")
        return False

    def seconds(self) -> float:
        return 0.0 if self._started is None else time.perf_counter() - self._started

    def envelope(self, body: dict) -> dict:
        """Report metadata followed by the command's own fields."""
        header = {
            "tool": "brownexit",
            "version": __version__,
            "command": self.command,
            "argv": self.argv,
            "seed": self.seed,
        }
        if self.timed:
            header["elapsed_seconds"] = round(self.seconds(), 3)
        header.update(body)
        return header

    def write(self, path, body: dict) -> Path:
        path = write_json(path, self.envelope(body))
        logger.debug(f"wrote {self.command} report to {path}")
        return path
