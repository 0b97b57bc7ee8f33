"""Tabular data model: CSV ingestion, one-hot encoding, train/test splits.

A Dataset is an immutable (features, labels) pair with binary 0/1 labels.
Nominal CSV columns are one-hot encoded at ingestion so the tree learner
only ever deals with numeric threshold splits. Missing values are rejected
outright; there is no imputation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Cell spellings treated as missing values (rejected, never imputed).
_MISSING = {"", "NA", "?"}


@dataclass(eq=False)
class Dataset:
    """Numeric feature matrix with 0/1 labels.

    Invariants enforced at construction: every feature value is finite,
    every label is exactly 0 or 1, shapes agree and n, d >= 1. Arrays are
    frozen afterwards so a Dataset can be shared freely across workers.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]

    def __post_init__(self):
        feats = np.ascontiguousarray(self.features, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if feats.ndim != 2 or feats.shape[0] < 1 or feats.shape[1] < 1:
            raise ValueError(f"features must be a non-empty 2-d matrix, got shape {feats.shape}")
        if labels.ndim != 1 or labels.shape[0] != feats.shape[0]:
            raise ValueError(
                f"labels length {labels.shape} does not match {feats.shape[0]} feature rows"
            )
        if not np.isfinite(feats).all():
            raise ValueError("features contain NaN or infinite values")
        if not np.isin(labels, (0, 1)).all():
            raise ValueError("labels must all be 0 or 1")
        names = tuple(str(c) for c in self.feature_names)
        if len(names) != feats.shape[1]:
            raise ValueError(
                f"{len(names)} feature names for {feats.shape[1]} feature columns"
            )
        feats.flags.writeable = False
        labels.flags.writeable = False
        self.features = feats
        self.labels = labels
        self.feature_names = names

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def subset(self, indices: np.ndarray) -> "Dataset":
        """New Dataset restricted to the given rows (in the given order)."""
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.features[idx], self.labels[idx], self.feature_names)


@dataclass(eq=False)
class SplitPair:
    """Disjoint train/test row partition of {0..n-1}, both sides non-empty."""

    train_indices: np.ndarray
    test_indices: np.ndarray


def _parse_cell(cell: str) -> float | None:
    try:
        v = float(cell)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def load_csv(path: str | Path, label_column: str, positive_label: str) -> Dataset:
    """Load an RFC-4180-style CSV (header row, UTF-8) into a Dataset.

    The label column must hold exactly two distinct values; rows equal to
    ``positive_label`` map to 1, the other value to 0. Feature columns in
    which every cell parses as a finite number pass through as numeric;
    columns in which no cell parses are nominal and get one-hot encoded
    into 0/1 columns named ``col=category`` (categories sorted). A column
    mixing numeric and non-numeric cells is rejected, as is any missing
    value ("", "NA" or "?").
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, expected a header row") from None
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    if label_column not in header:
        raise ValueError(f"{path}: label column {label_column!r} not in header {header}")
    label_pos = header.index(label_column)
    width = len(header)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ValueError(f"{path}: row {i + 2} has {len(row)} cells, expected {width}")
        for j, cell in enumerate(row):
            if cell.strip() in _MISSING:
                raise ValueError(
                    f"{path}: missing value at row {i + 2}, column {header[j]!r}"
                )

    label_values = sorted({row[label_pos] for row in rows})
    if len(label_values) != 2:
        raise ValueError(
            f"{path}: label column {label_column!r} has {len(label_values)} distinct "
            f"values, expected exactly 2: {label_values[:5]}"
        )
    if positive_label not in label_values:
        raise ValueError(
            f"{path}: positive label {positive_label!r} not among label values {label_values}"
        )
    labels = np.array([1 if row[label_pos] == positive_label else 0 for row in rows])

    columns: list[np.ndarray] = []
    names: list[str] = []
    for j, col_name in enumerate(header):
        if j == label_pos:
            continue
        cells = [row[j] for row in rows]
        parsed = [_parse_cell(c) for c in cells]
        n_numeric = sum(p is not None for p in parsed)
        if n_numeric == len(cells):
            columns.append(np.array(parsed, dtype=np.float64))
            names.append(col_name)
        elif n_numeric == 0:
            for cat in sorted(set(cells)):
                columns.append(np.array([1.0 if c == cat else 0.0 for c in cells]))
                names.append(f"{col_name}={cat}")
        else:
            bad = next(i for i, p in enumerate(parsed) if p is None)
            raise ValueError(
                f"{path}: column {col_name!r} mixes numeric and non-numeric cells "
                f"(first non-numeric at row {bad + 2}: {cells[bad]!r})"
            )
    return Dataset(np.column_stack(columns), labels, tuple(names))


def write_csv(data: Dataset, path: str | Path, label_column: str = "y") -> None:
    """Emit a Dataset as CSV (feature columns then the label column)."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(data.feature_names) + [label_column])
        for i in range(data.n):
            writer.writerow([repr(float(v)) for v in data.features[i]] + [int(data.labels[i])])


def random_split(data: Dataset, train_fraction: float, seed: int) -> SplitPair:
    """Random train/test partition with |train| = round(train_fraction * n).

    Deterministic in (data, train_fraction, seed). Raises if either side
    would be empty.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n = data.n
    if math.floor(train_fraction * n) < 1 or n - math.floor(train_fraction * n) < 1:
        raise ValueError(
            f"n={n} too small for train_fraction={train_fraction}: "
            "one side of the split would be empty"
        )
    n_train = int(math.floor(train_fraction * n + 0.5))
    n_train = min(max(n_train, 1), n - 1)
    perm = np.random.default_rng(seed).permutation(n)
    return SplitPair(
        train_indices=np.sort(perm[:n_train]),
        test_indices=np.sort(perm[n_train:]),
    )


def write_index_file(indices: np.ndarray, path: str | Path) -> None:
    """Audit dump of an index set: newline-delimited 0-based integers."""
    with open(path, "w", encoding="utf-8") as fh:
        for i in np.asarray(indices).ravel():
            fh.write(f"{int(i)}\n")


def read_index_file(path: str | Path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return np.array([int(line) for line in fh if line.strip()], dtype=np.int64)
