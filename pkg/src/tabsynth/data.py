"""Tabular datasets, CSV I/O and covariance/correlation statistics."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Sequence

import numpy as np

from tabsynth.errors import (
    ColumnLookupError,
    DegenerateColumnError,
    DomainError,
    InsufficientDataError,
    ParseError,
    SchemaError,
    ShapeError,
)


class Dataset:
    """Named numeric columns of equal length, immutable after construction.

    Values are held as an ``(n, k)`` read-only float64 array.
    """

    __slots__ = ("_names", "_values")

    def __init__(self, names: Sequence[str], values):
        names = tuple(names)
        arr = np.array(values, dtype=np.float64)
        if arr.size == 0 and arr.ndim < 2:
            arr = arr.reshape(0, len(names))
        if arr.ndim != 2 or arr.shape[1] != len(names):
            raise ShapeError(f"values of shape {arr.shape} do not match {len(names)} column names")
        for name in names:
            if not isinstance(name, str) or not name:
                raise SchemaError("column names must be nonempty strings")
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise SchemaError(f"duplicate column names: {', '.join(dupes)}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("dataset values must be finite (NaN/inf rejected)")
        arr.setflags(write=False)
        self._names = names
        self._values = arr

    @classmethod
    def from_columns(cls, columns: dict[str, Iterable[float]]) -> Dataset:
        names = list(columns)
        cols = [np.asarray(list(v), dtype=np.float64) for v in columns.values()]
        if len({c.shape[0] for c in cols}) > 1:
            raise ShapeError("columns differ in length")
        n = cols[0].shape[0] if cols else 0
        return cls(names, np.column_stack(cols) if cols else np.empty((n, 0)))

    @property
    def names(self) -> tuple[str, ...]:
        return self._names

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def n_rows(self) -> int:
        return self._values.shape[0]

    @property
    def n_cols(self) -> int:
        return self._values.shape[1]

    def __len__(self) -> int:
        return self.n_rows

    def column(self, name: str) -> np.ndarray:
        try:
            j = self._names.index(name)
        except ValueError:
            raise ColumnLookupError(f"unknown column {name!r}") from None
        return self._values[:, j]

    def select(self, names: Sequence[str]) -> Dataset:
        return Dataset(names, np.column_stack([self.column(n) for n in names]) if names
                       else np.empty((self.n_rows, 0)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return self._names == other._names and np.array_equal(self._values, other._values)

    def __repr__(self) -> str:
        return f"Dataset(columns={list(self._names)}, n_rows={self.n_rows})"


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    std: float
    min: float
    max: float
    n: int


class CorrelationMatrix:
    """Symmetric unit-diagonal matrix with entries in [-1, 1] and column labels."""

    __slots__ = ("labels", "values")

    def __init__(self, labels: Sequence[str], values):
        labels = tuple(labels)
        arr = np.array(values, dtype=np.float64)
        k = len(labels)
        if arr.shape != (k, k):
            raise ShapeError(f"correlation matrix shape {arr.shape} does not match {k} labels")
        if not np.all(np.isfinite(arr)):
            raise SchemaError("correlation matrix has non-finite entries")
        if np.max(np.abs(arr - arr.T), initial=0.0) > 1e-12:
            raise SchemaError("correlation matrix is not symmetric")
        if np.any(np.abs(np.diag(arr) - 1.0) > 1e-12):
            raise SchemaError("correlation matrix diagonal must be 1")
        if np.any(np.abs(arr) > 1.0 + 1e-12):
            raise SchemaError("correlation entries must lie in [-1, 1]")
        arr.setflags(write=False)
        self.labels = labels
        self.values = arr

    def __getitem__(self, key: tuple[str, str]) -> float:
        i, j = (self.labels.index(k) for k in key)
        return float(self.values[i, j])

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "values": self.values.tolist()}

    def __repr__(self) -> str:
        return f"CorrelationMatrix(labels={list(self.labels)})"


def load_csv(source: BinaryIO | bytes | str) -> Dataset:
    """Parse a UTF-8 CSV with a mandatory header row.

    ``source`` may be a binary stream, raw bytes, or already-decoded text.
    LF and CRLF line endings are accepted. Data rows are numbered from 1
    in error messages.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc}") from None
    reader = csv.reader(io.StringIO(source, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("missing header row", row=0) from None
    if any(not h for h in header):
        raise SchemaError("header contains an empty column name")
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise SchemaError(f"duplicate column names in header: {', '.join(dupes)}")

    rows = []
    for rownum, fields in enumerate(reader, start=1):
        if not fields:
            continue
        if len(fields) != len(header):
            raise ParseError(
                f"row {rownum}: expected {len(header)} fields, found {len(fields)}", row=rownum
            )
        parsed = []
        for name, cell in zip(header, fields):
            value = _parse_number(cell)
            if value is None:
                raise ParseError(
                    f"row {rownum}, column {name!r}: cannot parse {cell!r} as a finite number",
                    row=rownum,
                    column=name,
                )
            parsed.append(value)
        rows.append(parsed)
    values = np.array(rows, dtype=np.float64).reshape(len(rows), len(header))
    return Dataset(header, values)


def _parse_number(cell: str) -> float | None:
    cell = cell.strip()
    # float() also accepts "nan", "inf", "1_000"; none of those are admitted
    if not cell or "_" in cell:
        return None
    try:
        value = float(cell)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def write_csv(d: Dataset) -> bytes:
    """Serialize ``d`` as UTF-8 CSV, LF line endings, 17 significant digits."""
    lines = [",".join(_quote(n) for n in d.names)]
    for row in d.values:
        lines.append(",".join(format(v, ".17g") for v in row))
    return ("\n".join(lines) + "\n").encode("utf-8")


def _quote(name: str) -> str:
    if any(c in name for c in ',"\r\n'):
        return '"' + name.replace('"', '""') + '"'
    return name


def column_stats(d: Dataset, name: str) -> SummaryStats:
    x = d.column(name)
    n = x.shape[0]
    if n < 2:
        raise InsufficientDataError(f"column {name!r} needs at least 2 rows for a std, has {n}")
    mean = float(np.mean(x))
    std = math.sqrt(float(np.sum((x - mean) ** 2)) / (n - 1))
    return SummaryStats(mean=mean, std=std, min=float(x.min()), max=float(x.max()), n=n)


def covariance_matrix(d: Dataset) -> np.ndarray:
    """Sample covariance matrix (n - 1 denominator), two-pass."""
    n = d.n_rows
    if n < 2:
        raise InsufficientDataError(f"covariance needs at least 2 rows, has {n}")
    centered = d.values - d.values.mean(axis=0)
    cov = centered.T @ centered / (n - 1)
    return _symmetrize(cov)


def correlation_matrix(d: Dataset) -> CorrelationMatrix:
    """Pearson correlations ``Cov(X, Y) / (sd(X) sd(Y))``.

    Raises
    ------
    DegenerateColumnError
        If a column has zero variance.
    """
    cov = covariance_matrix(d)
    sd = np.sqrt(np.diag(cov))
    for name, s in zip(d.names, sd):
        if s == 0.0:
            raise DegenerateColumnError(name, f"column {name!r} is constant; correlation undefined")
    corr = cov / np.outer(sd, sd)
    corr = np.clip(_symmetrize(corr), -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return CorrelationMatrix(d.names, corr)


def average_ranks(x: np.ndarray) -> np.ndarray:
    """1-based ranks; tied values share the mean of their positions."""
    x = np.asarray(x, dtype=np.float64)
    order = np.argsort(x, kind="mergesort")
    sorted_x = x[order]
    # boundaries of runs of equal values
    starts = np.flatnonzero(np.r_[True, sorted_x[1:] != sorted_x[:-1]])
    ends = np.r_[starts[1:], x.size]
    run_rank = (starts + ends + 1) / 2.0
    ranks = np.empty_like(x)
    ranks[order] = np.repeat(run_rank, ends - starts)
    return ranks


def spearman_matrix(d: Dataset) -> CorrelationMatrix:
    ranked = np.column_stack([average_ranks(d.values[:, j]) for j in range(d.n_cols)])
    return correlation_matrix(Dataset(d.names, ranked.reshape(d.n_rows, d.n_cols)))


def _symmetrize(m: np.ndarray) -> np.ndarray:
    upper = np.triu(m)
    return upper + np.triu(m, 1).T
