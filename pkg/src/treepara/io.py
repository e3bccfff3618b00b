"""CSV readers and writers for signals, matrices and coefficient tables."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import SchemaError


def fmt(x) -> str:
    """Float text with 17 significant digits (round-trips exactly)."""
    return format(float(x), ".17g")


def read_signal_csv(path) -> np.ndarray:
    """``id,value`` rows; ids must be ``0..N-1`` in any order."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "id" not in reader.fieldnames or "value" not in reader.fieldnames:
            raise SchemaError(f"{path}: signal CSV needs 'id' and 'value' columns")
        rows = list(reader)
    try:
        ids = np.array([int(r["id"]) for r in rows])
        vals = np.array([float(r["value"]) for r in rows])
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    if sorted(ids.tolist()) != list(range(len(ids))) or not len(ids):
        raise SchemaError(f"{path}: ids must be unique and contiguous from 0")
    if not np.all(np.isfinite(vals)):
        raise SchemaError(f"{path}: non-finite values")
    out = np.empty(len(ids))
    out[ids] = vals
    return out


def write_signal_csv(path, values, extra: dict | None = None) -> None:
    """Write ``id,value`` or, with ``extra``, ``id`` plus one column per named array."""
    cols = {"value": values} if extra is None else extra
    names = list(cols)
    arrays = [np.asarray(cols[c]).ravel() for c in names]
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id"] + names)
        for i in range(arrays[0].size):
            w.writerow([i] + [fmt(a[i]) for a in arrays])


def read_matrix_csv(path) -> np.ndarray:
    """Dense matrix with a header row of column ids and a leading column of row ids."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if len(rows) < 2 or len(rows[0]) < 2:
        raise SchemaError(f"{path}: matrix CSV needs a header row and at least one data row")
    try:
        col_ids = [int(c) for c in rows[0][1:]]
        row_ids = [int(r[0]) for r in rows[1:]]
        data = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
    except ValueError as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    if data.shape != (len(row_ids), len(col_ids)):
        raise SchemaError(f"{path}: ragged rows")
    if sorted(row_ids) != list(range(len(row_ids))) or sorted(col_ids) != list(range(len(col_ids))):
        raise SchemaError(f"{path}: row/column ids must be contiguous from 0")
    out = np.empty_like(data)
    out[np.ix_(row_ids, col_ids)] = data
    return out


def write_matrix_csv(path, matrix) -> None:
    matrix = np.asarray(matrix)
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id"] + list(range(matrix.shape[1])))
        for i, row in enumerate(matrix):
            w.writerow([i] + [fmt(v) for v in row])


def write_long_matrix_csv(path, columns: dict) -> None:
    """2D signals in long form: ``i,j`` then one column per named ``(N, M)`` array."""
    names = list(columns)
    arrays = [np.asarray(columns[c]) for c in names]
    n, m = arrays[0].shape
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "j"] + names)
        for i in range(n):
            for j in range(m):
                w.writerow([i, j] + [fmt(a[i, j]) for a in arrays])


def write_coefficient_table_csv(path, tables) -> None:
    """``family,l,s,k,j,r,i,value``; 1D families leave ``s,r,i`` empty."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["family", "l", "s", "k", "j", "r", "i", "value"])
        for table in tables:
            for row in table.csv_rows():
                w.writerow(row[:-1] + [fmt(row[-1])])
