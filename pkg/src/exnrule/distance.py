"""Minkowski distances and nearest-neighbour lookup over a candidate pool."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigInvalidError, DimensionMismatchError, EmptyPoolError


@dataclass(frozen=True)
class DistanceMetric:
    q: float = 2.0

    def __post_init__(self):
        if not self.q >= 1.0 or not np.isfinite(self.q):
            raise ConfigInvalidError(f"Minkowski exponent must be finite and >= 1, got {self.q}")
        object.__setattr__(self, "q", float(self.q))

    def reduce(self, diff: np.ndarray) -> np.ndarray:
        """Distance along the last axis of an array of coordinate differences.

        Every code path in the package goes through here, so two routes that
        compare the same pair of points produce bit-identical distances.
        """
        if self.q == 2.0:
            return np.sqrt(_sum_last(diff * diff))
        a = np.abs(diff)
        if self.q == 1.0:
            return _sum_last(a)
        return _sum_last(a ** self.q) ** (1.0 / self.q)


def _sum_last(t: np.ndarray) -> np.ndarray:
    # left-to-right: np.sum's pairwise order depends on array layout for axes >= 8
    acc = t[..., 0].copy()
    for j in range(1, t.shape[-1]):
        acc += t[..., j]
    return acc


EUCLIDEAN = DistanceMetric(2.0)


def minkowski(a, b, metric: DistanceMetric = EUCLIDEAN) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or a.shape != b.shape or a.size < 1:
        raise DimensionMismatchError(f"vectors of shape {a.shape} and {b.shape}")
    return float(metric.reduce(a - b))


def pairwise(rows: np.ndarray, queries: np.ndarray, metric: DistanceMetric = EUCLIDEAN) -> np.ndarray:
    """``(len(queries), len(rows))`` distance matrix."""
    rows = np.asarray(rows, dtype=np.float64)
    queries = np.atleast_2d(np.asarray(queries, dtype=np.float64))
    if rows.shape[-1] != queries.shape[-1]:
        raise DimensionMismatchError(f"rows have {rows.shape[-1]} columns, queries {queries.shape[-1]}")
    return metric.reduce(rows[None, :, :] - queries[:, None, :])


def nearest_in_pool(pool: Sequence[int], sample_rows: np.ndarray, query,
                    metric: DistanceMetric = EUCLIDEAN) -> tuple[int, float]:
    """Closest pool member to ``query``.

    ``pool`` holds positions into ``sample_rows``; on exact ties the member that
    comes first in ``pool`` wins. Returns ``(pool member, distance)``.
    """
    pool = np.asarray(pool, dtype=np.int64)
    if pool.size == 0:
        raise EmptyPoolError("pool is empty")
    query = np.asarray(query, dtype=np.float64)
    sample_rows = np.asarray(sample_rows, dtype=np.float64)
    if query.ndim != 1 or sample_rows.shape[1] != query.size:
        raise DimensionMismatchError(f"query of length {query.size} against rows with {sample_rows.shape[1]} columns")
    d = metric.reduce(sample_rows[pool] - query)
    j = int(np.argmin(d))  # first occurrence of the minimum
    return int(pool[j]), float(d[j])
