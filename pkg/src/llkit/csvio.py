"""Strict numeric CSV reading and writing.

Dialect: comma separator, ``.`` decimal point, UTF-8, header row
required, purely numeric body, no quoting and no missing values.
Parse failures name the offending row and column.
"""

from __future__ import annotations

import numpy as np

__all__ = ["CsvError", "read_csv", "write_csv"]


class CsvError(ValueError):
    """A malformed or non-numeric CSV input."""


def read_csv(path: str) -> tuple[list[str], np.ndarray]:
    """Read a numeric table; returns (column names, n-by-d matrix)."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n").rstrip("\r") for ln in fh]
    lines = [ln for ln in lines if ln != ""]
    if not lines:
        raise CsvError(f"{path}: empty file")
    header = [name.strip() for name in lines[0].split(",")]
    if any(not name for name in header):
        raise CsvError(f"{path}: blank column name in header")
    width = len(header)
    rows = []
    for i, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != width:
            raise CsvError(
                f"{path}: row {i} has {len(cells)} cells, expected {width}")
        parsed = []
        for j, cell in enumerate(cells):
            try:
                parsed.append(float(cell))
            except ValueError:
                raise CsvError(
                    f"{path}: row {i}, column {header[j]!r}: "
                    f"cannot parse {cell.strip()!r} as a number") from None
        rows.append(parsed)
    if not rows:
        raise CsvError(f"{path}: no data rows")
    return header, np.asarray(rows, dtype=float)


def _cell(value) -> str:
    if value is None:
        return ""
    return repr(float(value))


def write_csv(path: str, header: list[str], rows) -> None:
    """Write rows of numbers (None renders as an empty cell)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")
