"""CSV ingestion for numeric matrices."""
from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np


class CsvError(ValueError):
    pass


def _parse_float(cell: str):
    try:
        v = float(cell)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def read_matrix(path) -> np.ndarray:
    """Read a comma-separated numeric matrix, one observation per row.

    A first row containing any non-numeric cell is taken as a header. Blank
    lines are skipped. Rows are numbered by file line in error messages.
    """
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            lines = list(enumerate(csv.reader(fh), start=1))
    except (OSError, UnicodeDecodeError, csv.Error) as exc:
        raise CsvError(f"cannot read {path}: {exc}") from None
    lines = [(i, row) for i, row in lines if any(c.strip() for c in row)]
    if lines and any(_parse_float(c) is None for c in lines[0][1]):
        lines = lines[1:]  # header
    if not lines:
        raise CsvError(f"{path}: no data rows")
    width = len(lines[0][1])
    data = []
    for lineno, row in lines:
        if len(row) != width:
            raise CsvError(f"{path}: row {lineno} has {len(row)} columns, expected {width}")
        values = []
        for col, cell in enumerate(row, start=1):
            v = _parse_float(cell)
            if v is None:
                raise CsvError(f"{path}: row {lineno}, column {col}: {cell.strip()!r} is not a finite number")
            values.append(v)
        data.append(values)
    return np.array(data, dtype=np.float64)


def read_vector(source: str) -> np.ndarray:
    """``source`` is a CSV file holding one row or one column, or an inline list ``"1,2,3"``."""
    if Path(source).is_file():
        m = read_matrix(source)
        if min(m.shape) != 1:
            raise CsvError(f"{source}: expected a single row or column, got shape {m.shape}")
        return m.reshape(-1)
    values = []
    for i, cell in enumerate(source.split(","), start=1):
        v = _parse_float(cell)
        if v is None:
            raise CsvError(f"entry {i} of {source!r} is not a finite number")
        values.append(v)
    return np.array(values)
