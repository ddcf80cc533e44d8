"""CSV ingest and CSV/JSON output."""

import csv
import json
import logging
import math
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .models import AngleDataset, AngleUnit, PairSample, wrap_angle
from .stats.mathcore import DomainError

logger = logging.getLogger(__name__)

ANGLE_HEADER = ["theta_u", "theta_v"]
SIGNIFICANT_DIGITS = 17


class DatasetError(Exception):
    """Malformed input file; ``line`` is the 1-based line number when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _read_rows(path) -> List[List[str]]:
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"dataset not found: {path}")
    with open(path, newline="") as f:
        rows = [[cell.strip() for cell in row] for row in csv.reader(f)]
    if not rows:
        raise DatasetError(f"{path} is empty", 1)
    return rows


def _parse_float(cell: str, line: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise DatasetError(f"not a number: {cell!r}", line)
    if not math.isfinite(value):
        raise DatasetError(f"non-finite value {cell!r}", line)
    return value


def ingest_csv(path, degrees: bool = False) -> AngleDataset:
    """Read a ``theta_u,theta_v`` file into an :class:`AngleDataset`.

    Values are converted from degrees when ``degrees`` is set and wrapped into [0, 2 pi).
    Blank lines are skipped; non-finite entries are rejected.

    Raises:
        DatasetError: on a missing header or a malformed row, with its line number
    """
    rows = _read_rows(path)
    if [c.lower() for c in rows[0]] != ANGLE_HEADER:
        raise DatasetError(f"expected header 'theta_u,theta_v', got {','.join(rows[0])!r}", 1)

    values = []
    for line, row in enumerate(rows[1:], start=2):
        if not row or all(c == "" for c in row):
            continue
        if len(row) != 2:
            raise DatasetError(f"expected 2 columns, got {len(row)}", line)
        values.append([_parse_float(c, line) for c in row])

    if not values:
        raise DatasetError("no data rows", 2)
    data = np.array(values)
    unit = AngleUnit.DEGREES if degrees else AngleUnit.RADIANS
    if degrees:
        data = np.deg2rad(data)
    data = wrap_angle(data)
    logger.debug(f"read {len(values)} angle pairs from {path} ({unit.value})")
    return AngleDataset(data[:, 0], data[:, 1], source=Path(path), unit=unit)


def vector_header(d: int) -> List[str]:
    return [f"u{i}" for i in range(1, d + 1)] + [f"v{i}" for i in range(1, d + 1)]


def read_pair_csv(path) -> PairSample:
    """Read ``u1..ud,v1..vd`` rows of unit vectors.

    Raises:
        DatasetError: on a bad header, malformed rows or vectors that are not of unit length
    """
    rows = _read_rows(path)
    header = [c.lower() for c in rows[0]]
    if len(header) < 4 or len(header) % 2 or header != vector_header(len(header) // 2):
        raise DatasetError("expected header u1..ud,v1..vd", 1)
    d = len(header) // 2

    values = []
    for line, row in enumerate(rows[1:], start=2):
        if not row or all(c == "" for c in row):
            continue
        if len(row) != 2 * d:
            raise DatasetError(f"expected {2 * d} columns, got {len(row)}", line)
        values.append([_parse_float(c, line) for c in row])
    if not values:
        raise DatasetError("no data rows", 2)

    data = np.array(values)
    u, v = data[:, :d], data[:, d:]
    # values written with 17 digits are unit length to rounding
    for name, block in (("u", u), ("v", v)):
        norms = np.linalg.norm(block, axis=1)
        bad = np.flatnonzero(np.abs(norms - 1) > 1e-9)
        if bad.size:
            raise DatasetError(f"{name} is not a unit vector (norm {norms[bad[0]]:.12g})", int(bad[0]) + 2)
        block /= norms[:, None]
    try:
        return PairSample(u, v)
    except DomainError as e:
        raise DatasetError(str(e))


def format_number(value: float) -> str:
    return format(float(value), f".{SIGNIFICANT_DIGITS}g")


def write_csv(path, header: Sequence[str], columns: Iterable) -> Path:
    """Write equal-length numeric columns under ``header``; every value at 17 significant digits."""
    columns = [np.ravel(np.asarray(c, dtype=float)) for c in columns]
    if len(columns) != len(header):
        raise ValueError(f"{len(header)} header names for {len(columns)} columns")
    path = Path(path)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow([format_number(v) for v in row])
    return path


def _json_default(value):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def to_json(data: dict) -> str:
    # NaN and infinity become null so the output stays valid JSON
    return json.dumps(_finite(data), indent=2, default=_json_default) + "\n"


def _finite(value):
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    if isinstance(value, (float, np.floating)) and not math.isfinite(value):
        return None
    return value


def write_json(path, data: dict) -> Path:
    path = Path(path)
    path.write_text(to_json(data))
    return path
