#!/usr/bin/env python3
"""
CSV and JSON writers.

Floats are written with a fixed number of significant digits through
Python's locale-independent formatting, so identical inputs give identical bytes.
"""

import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, Sequence

from lib.constants import Defaults

logger = logging.getLogger(__name__)


def format_float(value: float, digits: int = Defaults.SIGNIFICANT_DIGITS) -> str:
    """Format a number with ``digits`` significant digits ('inf', '-inf', 'nan' kept)."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, f".{digits}g")


def _cell(value: Any, digits: int) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float) or hasattr(value, "__float__"):
        return format_float(value, digits)
    return str(value)


def write_csv(
    path: Path,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    digits: int = Defaults.SIGNIFICANT_DIGITS,
) -> Path:
    """
    Write a CSV table with a header row.

    Args:
        path: Destination file (parent directories are created)
        header: Column names
        rows: Row values
        digits: Significant digits for floats

    Returns:
        The path written

    Raises:
        OSError: If the file cannot be written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v, digits) for v in row])
            count += 1
    logger.info("Wrote %d rows to %s", count, path)
    return path


def write_columns_csv(
    path: Path,
    columns: Dict[str, Sequence[float]],
    digits: int = Defaults.SIGNIFICANT_DIGITS,
) -> Path:
    """Write equally long named columns, in insertion order."""
    names = list(columns)
    lengths = {len(columns[n]) for n in names}
    if len(lengths) != 1:
        raise ValueError(f"columns have different lengths: {sorted(lengths)}")
    rows = zip(*(columns[n] for n in names))
    return write_csv(path, names, rows, digits)


def to_json(document: Dict[str, Any]) -> str:
    """Serialize deterministically (sorted keys, fixed indentation)."""
    return json.dumps(document, indent=2, sort_keys=True, allow_nan=True)


def write_json(path: Path, document: Dict[str, Any]) -> Path:
    """
    Write a JSON document.

    Raises:
        OSError: If the file cannot be written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as f:
        f.write(to_json(document) + "\n")
    logger.info("Wrote %s", path)
    return path
