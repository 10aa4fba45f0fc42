"""Tabular binary-classification data: loading, validation, splitting, resampling."""
from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateSplitError,
    InvalidSubsetSizeError,
    MissingValueError,
    NonBinaryLabelError,
    ParseError,
)
from .rng import RngStream

SPLIT_ATTEMPTS = 100
_MISSING_TOKENS = {"", "na", "nan", "null", "none", "?"}


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...] = ()
    name: str = "data"

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels)
        if X.ndim != 2:
            raise ParseError(f"features must be 2-D, got shape {X.shape}")
        n, p = X.shape
        # n >= 1 here so a one-row test fold is representable; loaders demand n >= 2
        if n < 1 or p < 1:
            raise ParseError(f"need n >= 1 and p >= 1, got n={n}, p={p}")
        if y.shape != (n,):
            raise ParseError(f"labels shape {y.shape} does not match n={n}")
        if not np.all(np.isfinite(X)):
            raise MissingValueError("features contain NaN or infinite values")
        if not np.all((y == 0) | (y == 1)):
            raise NonBinaryLabelError(f"labels outside {{0, 1}}: {sorted(set(np.unique(y).tolist()) - {0, 1})}")
        names = tuple(self.feature_names) or tuple(f"x{j + 1}" for j in range(p))
        if len(names) != p:
            raise ParseError(f"{len(names)} feature names for {p} columns")
        object.__setattr__(self, "features", _frozen(X))
        object.__setattr__(self, "labels", _frozen(y.astype(np.int64)))
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def p(self) -> int:
        return self.features.shape[1]

    def has_both_classes(self) -> bool:
        return 0 < int(self.labels.sum()) < self.n

    def subset(self, rows: Sequence[int], name: str | None = None) -> "Dataset":
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(self.features[rows], self.labels[rows], self.feature_names, name or self.name)

    def with_features(self, features: np.ndarray) -> "Dataset":
        return Dataset(features, self.labels, self.feature_names, self.name)


@dataclass(frozen=True, eq=False)
class Split:
    train: Dataset
    test: Dataset
    train_rows: np.ndarray = field(repr=False)
    test_rows: np.ndarray = field(repr=False)

    def __iter__(self):
        # allows ``train, test = train_test_split(...)``
        return iter((self.train, self.test))

    @property
    def partition_hash(self) -> str:
        h = hashlib.sha256()
        h.update(np.asarray(self.train_rows, dtype="<i8").tobytes())
        h.update(b"|")
        h.update(np.asarray(self.test_rows, dtype="<i8").tobytes())
        return h.hexdigest()[:16]


@dataclass(frozen=True, eq=False)
class BaseLearnerSample:
    """One ensemble member's view of the training set: bootstrap rows, feature subset."""

    row_indices: np.ndarray
    feature_indices: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.feature_indices, dtype=np.int64)
        if f.size < 1 or np.any(np.diff(f) <= 0):
            raise InvalidSubsetSizeError("feature_indices must be non-empty and strictly increasing")
        object.__setattr__(self, "row_indices", _frozen(np.asarray(self.row_indices, dtype=np.int64)))
        object.__setattr__(self, "feature_indices", _frozen(f))

    def __eq__(self, other):
        if not isinstance(other, BaseLearnerSample):
            return NotImplemented
        return (np.array_equal(self.row_indices, other.row_indices)
                and np.array_equal(self.feature_indices, other.feature_indices))

    __hash__ = None


def _parse_float(cell: str, row: int, col: str) -> float:
    token = cell.strip()
    if token.lower() in _MISSING_TOKENS:
        raise MissingValueError(f"missing value at row {row}, column {col!r}")
    try:
        v = float(token)
    except ValueError:
        raise ParseError(f"cannot parse {cell!r} at row {row}, column {col!r}") from None
    if math.isnan(v):
        raise MissingValueError(f"missing value at row {row}, column {col!r}")
    if math.isinf(v):
        raise ParseError(f"non-finite value {cell!r} at row {row}, column {col!r}")
    return v


def load_csv(path: str | Path, label_column: str | None = None, name: str | None = None) -> Dataset:
    """Read a headed CSV; the label column defaults to the last one."""
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except (UnicodeDecodeError, csv.Error) as e:
        raise ParseError(f"{path}: {e}") from None
    rows = [r for r in rows if r and not (len(r) == 1 and not r[0].strip())]
    if not rows:
        raise ParseError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if label_column is None:
        li = len(header) - 1
    elif label_column in header:
        li = header.index(label_column)
    else:
        raise ParseError(f"{path}: no column named {label_column!r}")
    if len(header) < 2:
        raise ParseError(f"{path}: need at least one feature column and a label column")

    X, y = [], []
    for lineno, r in enumerate(rows[1:], start=2):
        if len(r) != len(header):
            raise ParseError(f"{path}:{lineno}: expected {len(header)} fields, got {len(r)}")
        raw_label = r[li].strip()
        if raw_label.lower() in _MISSING_TOKENS:
            raise MissingValueError(f"{path}:{lineno}: missing label")
        try:
            lab = float(raw_label)
        except ValueError:
            raise NonBinaryLabelError(f"{path}:{lineno}: label {raw_label!r} is not 0 or 1") from None
        if lab not in (0.0, 1.0):
            raise NonBinaryLabelError(f"{path}:{lineno}: label {raw_label!r} is not 0 or 1")
        y.append(int(lab))
        X.append([_parse_float(c, lineno, header[j]) for j, c in enumerate(r) if j != li])
    if len(X) < 2:
        raise ParseError(f"{path}: need at least 2 data rows")
    names = tuple(h for j, h in enumerate(header) if j != li)
    return Dataset(np.array(X), np.array(y), names, name or path.stem)


def write_csv(data: Dataset, path: str | Path, label_name: str = "class") -> None:
    """Write ``data`` in the format :func:`load_csv` reads; floats use ``repr`` so they round-trip exactly."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*data.feature_names, label_name])
        for xrow, lab in zip(data.features, data.labels):
            w.writerow([repr(float(v)) for v in xrow] + [int(lab)])


def train_test_split(data: Dataset, train_fraction: float, rng: RngStream) -> Split:
    """Simple random (non-stratified) split.

    Permutations are drawn from one sampler until the training part holds both
    classes; after ``SPLIT_ATTEMPTS`` failures :class:`DegenerateSplitError`.
    """
    if not 0.0 < train_fraction < 1.0:
        raise DegenerateSplitError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    n_train = math.floor(train_fraction * data.n)
    if n_train < 2 or n_train >= data.n:
        raise DegenerateSplitError(f"fraction {train_fraction} of n={data.n} leaves no usable split")
    s = rng.sampler()
    for _ in range(SPLIT_ATTEMPTS):
        perm = s.permutation(data.n)
        tr, te = perm[:n_train], perm[n_train:]
        if 0 < data.labels[tr].sum() < n_train:
            return Split(data.subset(tr), data.subset(te), _frozen(tr), _frozen(te))
    raise DegenerateSplitError(f"no split with both classes in training after {SPLIT_ATTEMPTS} attempts")


def draw_base_learner_sample(n_train: int, p: int, p_prime: int, rng: RngStream,
                             bootstrap: bool = True) -> BaseLearnerSample:
    """Bootstrap ``n_train`` rows (with replacement) then ``p_prime`` features (without)."""
    if not 1 <= p_prime <= p:
        raise InvalidSubsetSizeError(f"p_prime={p_prime} outside [1, {p}]")
    if n_train < 1:
        raise InvalidSubsetSizeError("n_train must be >= 1")
    s = rng.sampler()
    rows = s.integers(n_train, n_train) if bootstrap else np.arange(n_train)
    feats = s.choice_without_replacement(p, p_prime)
    return BaseLearnerSample(rows, feats)


@dataclass(frozen=True)
class ZScore:
    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, train: Dataset) -> "ZScore":
        sd = train.features.std(axis=0)
        return cls(train.features.mean(axis=0), np.where(sd > 0, sd, 1.0))

    def apply(self, data: Dataset) -> Dataset:
        return data.with_features((data.features - self.mean) / self.scale)
