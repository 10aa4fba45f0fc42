"""kNN-family comparators: plain kNN, inverse-distance weighted kNN, random-subspace kNN."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .dataset import Dataset
from .distance import EUCLIDEAN, DistanceMetric, pairwise
from .ensemble import (
    ExNRuleConfig,
    FeatureRule,
    SUBSET_RULES,
    ensemble_vote,
    fit as exnrule_fit,
    neighbour_vote,
    resolve_subset_size,
)
from .errors import ConfigInvalidError, DegenerateFoldsError, DimensionMismatchError
from .metrics import accuracy
from .rng import RngStream

WKNN_EPS = 1e-12
DEFAULT_GRID = tuple(range(1, 11))
_BLOCK_ELEMENTS = 1 << 22


@dataclass(frozen=True)
class KnnConfig:
    k: int = 3
    metric: DistanceMetric = EUCLIDEAN


@dataclass(frozen=True)
class RknnConfig:
    B: int = 500
    k: int = 3
    feature_rule: FeatureRule = "sqrt_p"
    metric: DistanceMetric = EUCLIDEAN
    master_seed: int = 0


def _check(train: Dataset, X, k: int) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != train.p:
        raise DimensionMismatchError(f"queries have {X.shape[1]} features, training data {train.p}")
    if not 1 <= k <= train.n:
        raise ConfigInvalidError(f"k={k} outside [1, {train.n}]")
    return X


def _neighbours(train: Dataset, X: np.ndarray, k: int, metric: DistanceMetric):
    """Indices and distances of the k nearest rows; equal distances keep row order."""
    D = pairwise(train.features, X, metric)
    idx = np.argsort(D, axis=1, kind="stable")[:, :k]
    return idx, np.take_along_axis(D, idx, axis=1)


def knn_predict_batch(train: Dataset, X, config: KnnConfig) -> tuple[np.ndarray, np.ndarray]:
    X = _check(train, X, config.k)
    idx, _ = _neighbours(train, X, config.k, config.metric)
    votes, probs = neighbour_vote(train.labels[idx])
    return votes.astype(np.int64), probs


def knn_predict(train: Dataset, query, config: KnnConfig) -> tuple[int, float]:
    labels, probs = knn_predict_batch(train, query, config)
    return int(labels[0]), float(probs[0])


def wknn_predict_batch(train: Dataset, X, config: KnnConfig) -> tuple[np.ndarray, np.ndarray]:
    """Neighbour ``i`` weighs ``1 / (d_i + WKNN_EPS)``; exact mass ties go to the nearest neighbour."""
    X = _check(train, X, config.k)
    idx, dist = _neighbours(train, X, config.k, config.metric)
    y = train.labels[idx]
    w = 1.0 / (dist + WKNN_EPS)
    mass1 = np.where(y == 1, w, 0.0).sum(axis=1)
    mass0 = np.where(y == 0, w, 0.0).sum(axis=1)
    labels = np.where(mass1 > mass0, 1, np.where(mass1 < mass0, 0, y[:, 0]))
    return labels.astype(np.int64), mass1 / (mass0 + mass1)


def wknn_predict(train: Dataset, query, config: KnnConfig) -> tuple[int, float]:
    labels, probs = wknn_predict_batch(train, query, config)
    return int(labels[0]), float(probs[0])


class RknnModel:
    """B plain kNN learners, each on its own feature subset; no row resampling."""

    def __init__(self, train: Dataset, config: RknnConfig, feature_subsets: np.ndarray):
        self.train = train
        self.config = config
        self.feature_subsets = np.asarray(feature_subsets, dtype=np.int64)
        self.feature_subsets.flags.writeable = False

    @property
    def B(self) -> int:
        return len(self.feature_subsets)

    def predict_arrays(self, X) -> tuple[np.ndarray, np.ndarray]:
        c = self.config
        X = _check(self.train, X, c.k)
        Xtr = self.train.features
        n, (B, pp) = Xtr.shape[0], self.feature_subsets.shape
        votes = np.empty((len(X), B), dtype=np.int8)
        probs = np.empty((len(X), B))
        step = max(1, _BLOCK_ELEMENTS // (len(X) * n * pp))
        for b0 in range(0, B, step):
            F = self.feature_subsets[b0:b0 + step]                    # (Bc, p')
            pool = Xtr[:, F].transpose(1, 0, 2)                        # (Bc, n, p')
            D = c.metric.reduce(pool[None] - X[:, F][:, :, None, :])   # (Q, Bc, n)
            idx = np.argsort(D, axis=-1, kind="stable")[..., :c.k]
            votes[:, b0:b0 + step], probs[:, b0:b0 + step] = neighbour_vote(self.train.labels[idx])
        return ensemble_vote(votes, probs)


def rknn_fit(train: Dataset, config: RknnConfig) -> RknnModel:
    if config.B < 1:
        raise ConfigInvalidError(f"B must be >= 1, got {config.B}")
    if not 1 <= config.k <= train.n:
        raise ConfigInvalidError(f"k={config.k} outside [1, {train.n}]")
    if not (isinstance(config.feature_rule, (int, np.integer)) or config.feature_rule in SUBSET_RULES):
        raise ConfigInvalidError(f"unknown feature rule {config.feature_rule!r}")
    pp = resolve_subset_size(config.feature_rule, train.p)
    subsets = np.stack([RngStream(config.master_seed, b).sampler().choice_without_replacement(train.p, pp)
                        for b in range(config.B)])
    return RknnModel(train, config, subsets)


def rknn_predict(model: RknnModel, query) -> tuple[int, float]:
    labels, probs = model.predict_arrays(query)
    return int(labels[0]), float(probs[0])


LEARNERS = ("knn", "wknn", "rknn", "exnrule")


def fit_predict(learner: str, train: Dataset, X, k: int, template=None, workers: int = 1):
    """Fit learner ``learner`` with neighbourhood size ``k`` and predict ``X``.

    ``template`` supplies the remaining settings for the ensembles (an
    :class:`RknnConfig` or :class:`ExNRuleConfig`); ``k`` overrides its ``k``.
    """
    if learner == "knn":
        metric = template.metric if template is not None else EUCLIDEAN
        return knn_predict_batch(train, X, KnnConfig(k, metric))
    if learner == "wknn":
        metric = template.metric if template is not None else EUCLIDEAN
        return wknn_predict_batch(train, X, KnnConfig(k, metric))
    if learner == "rknn":
        return rknn_fit(train, replace(template or RknnConfig(), k=k)).predict_arrays(X)
    if learner == "exnrule":
        labels, probs, _ = exnrule_fit(train, replace(template or ExNRuleConfig(), k=k)).predict_arrays(X, workers)
        return labels, probs
    raise ConfigInvalidError(f"unknown learner {learner!r}; expected one of {LEARNERS}")


def tune_k(train: Dataset, grid=DEFAULT_GRID, folds: int = 5, learner: str = "knn",
           rng: RngStream | None = None, template=None) -> int:
    """Grid value with the best mean cross-validated accuracy; ties go to the smaller k.

    Fold ``f`` holds the rows at positions ``f, f + folds, ...`` of a random
    permutation drawn from ``rng``.
    """
    grid = sorted(set(int(k) for k in grid))
    if not grid:
        raise ConfigInvalidError("empty k grid")
    if learner not in LEARNERS:
        raise ConfigInvalidError(f"unknown learner {learner!r}")
    if len(grid) == 1:
        return grid[0]
    if folds < 2 or folds > train.n:
        raise DegenerateFoldsError(f"cannot make {folds} folds from {train.n} rows")
    perm = (rng or RngStream(0)).sampler().permutation(train.n)
    splits = []
    for f in range(folds):
        held = np.sort(perm[f::folds])
        keep = np.setdiff1d(np.arange(train.n), held)
        part = train.subset(keep)
        if not part.has_both_classes():
            raise DegenerateFoldsError(f"fold {f} leaves a single-class training part")
        if grid[-1] > part.n:
            raise ConfigInvalidError(f"k={grid[-1]} exceeds fold training size {part.n}")
        splits.append((part, train.subset(held)))

    best_k, best = grid[0], -math.inf
    for k in grid:
        accs = [accuracy(fit_predict(learner, tr, te.features, k, template)[0], te.labels) for tr, te in splits]
        score = math.fsum(accs) / folds
        if score > best:
            best_k, best = k, score
    return best_k
