"""Sample containers, CSV ingestion and reproducible random streams."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np


class DataError(ValueError):
    """Raised for malformed or inconsistent input data."""


class ParseError(DataError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class EmptyInputError(DataError):
    pass


@dataclass(frozen=True, eq=False)
class SampleMatrix:
    """An ``n x d`` matrix of finite observations, one row per sample."""

    values: np.ndarray
    column_names: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise DataError(f"expected a 2-d array, got shape {values.shape}")
        if values.shape[0] < 1 or values.shape[1] < 1:
            raise EmptyInputError(f"sample matrix must be non-empty, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DataError("sample matrix contains NaN or infinite entries")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.column_names is not None:
            names = tuple(str(c) for c in self.column_names)
            if len(names) != values.shape[1]:
                raise DataError(
                    f"{len(names)} column names given for {values.shape[1]} columns")
            object.__setattr__(self, "column_names", names)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"SampleMatrix(n={self.n}, d={self.d}, column_names={self.column_names})"


def as_samples(x) -> SampleMatrix:
    """Coerce arrays (1-d is treated as a single column) to a SampleMatrix."""
    if isinstance(x, SampleMatrix):
        return x
    return SampleMatrix(np.asarray(x, dtype=float))


def check_paired(x: SampleMatrix, y: SampleMatrix):
    if x.n != y.n:
        raise DataError(f"row-count mismatch: x has {x.n} rows, y has {y.n} rows")


def load_csv(path, has_header: bool = False) -> SampleMatrix:
    """Read a comma-separated numeric file into a SampleMatrix.

    Quoting is not supported. Line numbers in errors are 1-based and count the
    header line when present.
    """
    text = Path(path).read_text(encoding="utf-8")
    lines = [(i + 1, ln) for i, ln in enumerate(text.splitlines()) if ln.strip()]
    if not lines:
        raise EmptyInputError(f"{path}: file is empty")

    names = None
    if has_header:
        names = tuple(c.strip() for c in lines[0][1].split(","))
        lines = lines[1:]
        if not lines:
            raise EmptyInputError(f"{path}: no data rows after header")

    rows = []
    width = len(names) if names is not None else None
    for row_no, (line_no, line) in enumerate(lines, start=1):
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise ParseError(
                f"{path}: expected {width} fields, found {len(cells)}", line=line_no)
        row = []
        for col_no, cell in enumerate(cells, start=1):
            try:
                value = float(cell)
            except ValueError:
                raise ParseError(
                    f"{path}: non-numeric cell {cell.strip()!r} at row {row_no}",
                    line=line_no, column=col_no) from None
            if not np.isfinite(value):
                raise ParseError(
                    f"{path}: non-finite cell {cell.strip()!r} at row {row_no}",
                    line=line_no, column=col_no)
            row.append(value)
        rows.append(row)
    return SampleMatrix(np.array(rows, dtype=float), column_names=names)


def save_csv(samples, path, header: bool | None = None):
    """Write with round-trip float formatting so ``load_csv`` recovers the exact values."""
    samples = as_samples(samples)
    if header is None:
        header = samples.column_names is not None
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            names = samples.column_names or tuple(f"x{j + 1}" for j in range(samples.d))
            fh.write(",".join(names) + "\n")
        for row in samples.values:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def stream_key(*parts) -> int:
    """Stable 64-bit key for a tuple of labels, independent of PYTHONHASHSEED."""
    text = "\x1f".join(repr(p) for p in parts)
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "little")


class RandomStream(np.random.Generator):
    """A numpy ``Generator`` addressed by ``(seed, stream_id)``.

    The bit generator is Philox seeded through ``SeedSequence(seed,
    spawn_key=(stream_id,))``, so the draws depend only on the two integers and
    never on thread scheduling.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        if not (0 <= self.seed < 2**64 and 0 <= self.stream_id < 2**64):
            raise ValueError("seed and stream_id must be unsigned 64-bit integers")
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        super().__init__(np.random.Philox(ss))

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, stream_id={self.stream_id})"

    __str__ = __repr__


def split_stream(seed: int, stream_id: int = 0) -> RandomStream:
    return RandomStream(seed, stream_id)


def substream(seed: int, *labels) -> RandomStream:
    """Stream for a labelled task, e.g. ``substream(seed, "A6", 0.5, rep)``."""
    return RandomStream(seed, stream_key(*labels))
