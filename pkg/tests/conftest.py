"""Shared fixtures."""

import numpy as np
import pytest

from brownexit.stats.mathcore import RngStream


@pytest.fixture
def stream():
    """Factory of seeded streams: ``stream(seed, stream_id=0)``."""
    def make(seed: int = 12345, stream_id=0) -> RngStream:
        return RngStream(seed, stream_id)
    return make


@pytest.fixture
def angle_csv(tmp_path):
    """Write angle pairs as a ``theta_u,theta_v`` file and return its path."""
    def write(theta_u, theta_v, name: str = "angles.csv"):
        path = tmp_path / name
        pairs = zip(np.asarray(theta_u, dtype=float).tolist(), np.asarray(theta_v, dtype=float).tolist())
        rows = ["theta_u,theta_v"] + [f"{a!r},{b!r}" for a, b in pairs]
        path.write_text("\n".join(rows) + "\n")
        return path
    return write
