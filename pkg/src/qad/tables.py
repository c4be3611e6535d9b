"""CSV ingestion into numeric data tables.

Parsing is locale-independent (decimal point only).  Cells matching a missing
marker become NaN; cells that fail numeric parsing also become NaN but are
tallied per column so callers can surface a warning.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .pairwise import DataTable

__all__ = ["IngestReport", "ingest_csv"]

DEFAULT_MISSING = ("", "NA")


@dataclass(frozen=True)
class IngestReport:
    """Parsing diagnostics: rows read and non-numeric cell tallies per column."""

    n_rows: int
    non_numeric: dict

    @property
    def total_non_numeric(self) -> int:
        return sum(self.non_numeric.values())

    def messages(self):
        return [
            f"column {name!r}: {count} non-numeric cell(s) treated as missing"
            for name, count in self.non_numeric.items()
            if count
        ]


def _detect_delimiter(first_line: str) -> str:
    candidates = [",", "\t", ";"]
    counts = {c: first_line.count(c) for c in candidates}
    best = max(counts, key=counts.get)
    return best if counts[best] > 0 else ","


def ingest_csv(path, missing=DEFAULT_MISSING, delimiter: str | None = None):
    """Read a delimited text file with a header row of unique column names.

    Returns (DataTable, IngestReport).  Raises DataError for unreadable
    files, duplicate or empty headers, ragged rows, and zero data rows.
    """
    try:
        with open(path, "r", encoding="utf-8-sig", newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise DataError(f"{path}: empty file")
    if delimiter is None:
        delimiter = _detect_delimiter(lines[0])
    reader = csv.reader(io.StringIO("\n".join(lines)), delimiter=delimiter)
    rows = list(reader)
    header = [h.strip() for h in rows[0]]
    if any(not h for h in header):
        raise DataError(f"{path}: empty column name in header")
    if len(set(header)) != len(header):
        raise DataError(f"{path}: duplicate column names in header")
    data_rows = rows[1:]
    if not data_rows:
        raise DataError(f"{path}: zero data rows")

    missing_set = set(missing)
    k = len(header)
    values = np.full((len(data_rows), k), np.nan)
    non_numeric = {name: 0 for name in header}
    for i, row in enumerate(data_rows):
        if len(row) != k:
            raise DataError(f"{path}: row {i + 2} has {len(row)} fields, expected {k}")
        for j, cell in enumerate(row):
            cell = cell.strip()
            if cell in missing_set:
                continue
            try:
                values[i, j] = float(cell)
            except ValueError:
                non_numeric[header[j]] += 1
    table = DataTable(tuple(header), values)
    return table, IngestReport(n_rows=len(data_rows), non_numeric=non_numeric)
