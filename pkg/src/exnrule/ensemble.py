"""Extended-neighbourhood-rule kNN ensemble.

Each base learner owns a bootstrap sample of the training rows restricted to a
random feature subset. For a query it walks a greedy chain: the first hop is
the pool entry nearest the query, every later hop is the remaining pool entry
nearest the *previous hop*. The k chain labels vote inside the learner, and the
B learner labels vote again for the ensemble.
"""
from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .dataset import BaseLearnerSample, Dataset, draw_base_learner_sample
from .distance import EUCLIDEAN, DistanceMetric, nearest_in_pool
from .errors import (
    ChainExhaustedError,
    ConfigInvalidError,
    DimensionMismatchError,
    SingleClassTrainingError,
)
from .rng import RngStream

FeatureRule = Union[str, int]
SUBSET_RULES = ("sqrt_p", "p/2", "p/3", "p/4", "p/5")
MODEL_FORMAT = "exnrule-model"
MODEL_VERSION = 1

# upper bound on floats in one (queries, learners, pool, features) block
_BLOCK_ELEMENTS = 1 << 22


def resolve_subset_size(rule: FeatureRule, p: int) -> int:
    """Number of features a base learner sees.

    ``"sqrt_p"`` gives ``max(1, floor(sqrt(p)))``, ``"p/d"`` gives
    ``max(1, floor(p / d))``, an int is taken as is.
    """
    if isinstance(rule, (int, np.integer)) and not isinstance(rule, bool):
        size = int(rule)
    elif rule == "sqrt_p":
        size = max(1, math.isqrt(p))
    elif isinstance(rule, str) and rule in SUBSET_RULES:
        size = max(1, p // int(rule[2:]))
    else:
        raise ConfigInvalidError(f"unknown feature rule {rule!r}")
    if not 1 <= size <= p:
        raise ConfigInvalidError(f"feature subset size {size} outside [1, {p}]")
    return size


@dataclass(frozen=True)
class ExNRuleConfig:
    B: int = 500
    k: int = 3
    feature_rule: FeatureRule = "sqrt_p"
    metric: DistanceMetric = EUCLIDEAN
    master_seed: int = 0
    bootstrap: bool = True

    def validate(self, n_train: int, p: int) -> int:
        """Check against a training set shape; returns the resolved subset size."""
        if self.B < 1:
            raise ConfigInvalidError(f"B must be >= 1, got {self.B}")
        if self.k < 1:
            raise ConfigInvalidError(f"k must be >= 1, got {self.k}")
        if self.k > n_train:
            raise ConfigInvalidError(f"k={self.k} exceeds {n_train} training rows")
        if not (self.feature_rule == "sqrt_p" or isinstance(self.feature_rule, (int, np.integer))):
            raise ConfigInvalidError(f"feature_rule must be 'sqrt_p' or a fixed count, got {self.feature_rule!r}")
        return resolve_subset_size(self.feature_rule, p)


@dataclass(frozen=True, eq=False)
class ChainResult:
    pool_positions: np.ndarray
    row_indices: np.ndarray
    labels: np.ndarray
    hop_distances: np.ndarray

    def __len__(self):
        return len(self.labels)


@dataclass(frozen=True)
class Prediction:
    label: int
    prob_class1: float
    per_base_votes: tuple[int, ...] | None = field(default=None, repr=False)


class ExNRuleModel:
    """Fitted ensemble: the training set, the config and B base-learner samples.

    Only the samples are drawn at fit time; chains depend on the query. The
    projected pools are materialised once here so prediction is pure array work.
    Instances are read-only after construction and safe to share across threads.
    """

    def __init__(self, train: Dataset, config: ExNRuleConfig, samples: list[BaseLearnerSample]):
        self.train = train
        self.config = config
        self.samples = tuple(samples)
        self.p_prime = len(samples[0].feature_indices)
        self._features = np.stack([s.feature_indices for s in samples])            # (B, p')
        rows = np.stack([s.row_indices for s in samples])                           # (B, n)
        self._pool = train.features[rows[:, :, None], self._features[:, None, :]]  # (B, n, p')
        self._pool_labels = train.labels[rows].astype(np.int8)                      # (B, n)
        for a in (self._features, self._pool, self._pool_labels):
            a.flags.writeable = False

    @property
    def B(self) -> int:
        return len(self.samples)

    def chain_batch(self, queries: np.ndarray, lo: int = 0, hi: int | None = None):
        """Chains of learners ``lo:hi`` for every query.

        Returns ``(positions, labels, hops)`` each shaped ``(Q, hi - lo, k)``.
        """
        hi = self.B if hi is None else hi
        k, metric = self.config.k, self.config.metric
        P = self._pool[lo:hi]
        L = self._pool_labels[lo:hi]
        Q, Bc, n = len(queries), hi - lo, P.shape[1]
        positions = np.empty((Q, Bc, k), dtype=np.int64)
        labels = np.empty((Q, Bc, k), dtype=np.int8)
        hops = np.empty((Q, Bc, k))
        step = max(1, _BLOCK_ELEMENTS // max(1, Bc * n * self.p_prime))
        bi = np.arange(Bc)[None, :]
        for q0 in range(0, Q, step):
            cur = queries[q0:q0 + step][:, self._features[lo:hi]]   # (Qc, Bc, p')
            qi = np.arange(len(cur))[:, None]
            used = np.zeros((len(cur), Bc, n), dtype=bool)
            for i in range(k):
                d = metric.reduce(P[None] - cur[:, :, None, :])
                d[used] = np.inf
                j = d.argmin(axis=-1)                                 # first minimum wins ties
                positions[q0:q0 + step, :, i] = j
                hops[q0:q0 + step, :, i] = d[qi, bi, j]
                labels[q0:q0 + step, :, i] = L[bi, j]
                used[qi, bi, j] = True
                cur = P[bi, j]
        return positions, labels, hops

    def predict_arrays(self, X, workers: int = 1, keep_votes: bool = False):
        """Vectorised prediction: ``(labels, probs, votes or None)``.

        With ``workers > 1`` learner blocks run on a thread pool. Blocks write
        into fixed B-indexed slots and the probability mean uses ``math.fsum``,
        so output does not depend on the worker count.
        """
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.train.p:
            raise DimensionMismatchError(f"queries have {X.shape[1]} features, model expects {self.train.p}")
        if not np.all(np.isfinite(X)):
            raise DimensionMismatchError("queries contain non-finite values")
        Q, B = len(X), self.B
        votes = np.empty((Q, B), dtype=np.int8)
        probs = np.empty((Q, B))

        def run(bounds):
            lo, hi = bounds
            _, labs, _ = self.chain_batch(X, lo, hi)
            votes[:, lo:hi], probs[:, lo:hi] = neighbour_vote(labs)

        bounds = _blocks(B, max(1, workers))
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as ex:
                list(ex.map(run, bounds))
        else:
            for b in bounds:
                run(b)

        labels, mean_prob = ensemble_vote(votes, probs)
        return labels, mean_prob, (votes if keep_votes else None)

    def to_json(self) -> str:
        c = self.config
        doc = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "train_digest": dataset_digest(self.train),
            "config": {"B": c.B, "k": c.k, "feature_rule": c.feature_rule, "q": c.metric.q,
                       "master_seed": c.master_seed, "bootstrap": c.bootstrap},
            "samples": [{"rows": s.row_indices.tolist(), "features": s.feature_indices.tolist()}
                        for s in self.samples],
        }
        return json.dumps(doc, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str, train: Dataset) -> "ExNRuleModel":
        doc = json.loads(text)
        if doc.get("format") != MODEL_FORMAT or doc.get("version") != MODEL_VERSION:
            raise ConfigInvalidError(f"not a version-{MODEL_VERSION} {MODEL_FORMAT} document")
        if doc["train_digest"] != dataset_digest(train):
            raise ConfigInvalidError("model was fitted on a different training set")
        c = doc["config"]
        config = ExNRuleConfig(c["B"], c["k"], c["feature_rule"], DistanceMetric(c["q"]),
                               c["master_seed"], c["bootstrap"])
        samples = [BaseLearnerSample(s["rows"], s["features"]) for s in doc["samples"]]
        return cls(train, config, samples)


def dataset_digest(data: Dataset) -> str:
    h = hashlib.sha256(np.ascontiguousarray(data.features, dtype="<f8").tobytes())
    h.update(np.ascontiguousarray(data.labels, dtype="<i8").tobytes())
    return h.hexdigest()


def neighbour_vote(labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-learner vote over the last axis of a 0/1 label array.

    Majority wins; an even split takes ``labels[..., 0]`` (the neighbour closest
    to the query). Returns ``(votes, class-1 fractions)``.
    """
    k = labels.shape[-1]
    ones = labels.sum(axis=-1, dtype=np.int64)
    votes = np.where(2 * ones > k, 1, np.where(2 * ones < k, 0, labels[..., 0]))
    return votes.astype(np.int8), ones / k


def ensemble_vote(votes: np.ndarray, probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Second-round vote over learners (axis 1).

    Probability is the mean of learner probabilities, summed with ``math.fsum``
    so the result is independent of summation order. A tied vote goes to the
    class with the larger mean probability, then to 0.
    """
    B = votes.shape[1]
    mean_prob = np.array([math.fsum(row) / B for row in probs])
    n1 = votes.sum(axis=1, dtype=np.int64)
    labels = np.where(2 * n1 > B, 1, np.where(2 * n1 < B, 0, (mean_prob > 0.5).astype(np.int64)))
    return labels.astype(np.int64), mean_prob


def _blocks(total: int, parts: int) -> list[tuple[int, int]]:
    parts = min(parts, total)
    edges = np.linspace(0, total, parts + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def fit(train: Dataset, config: ExNRuleConfig) -> ExNRuleModel:
    """Draw the B base-learner samples; learner ``b`` uses stream ``(master_seed, b)``."""
    p_prime = config.validate(train.n, train.p)
    if not train.has_both_classes():
        raise SingleClassTrainingError("training data contains a single class")
    samples = [
        draw_base_learner_sample(train.n, train.p, p_prime, RngStream(config.master_seed, b), config.bootstrap)
        for b in range(config.B)
    ]
    return ExNRuleModel(train, config, samples)


def extended_chain(sample: BaseLearnerSample, train: Dataset, query_projected, k: int,
                   metric: DistanceMetric = EUCLIDEAN) -> ChainResult:
    """Walk one learner's chain with the scalar pool lookup (reference path)."""
    rows = train.features[np.ix_(sample.row_indices, sample.feature_indices)]
    query_projected = np.asarray(query_projected, dtype=np.float64)
    if query_projected.shape != (rows.shape[1],):
        raise DimensionMismatchError(f"projected query must have length {rows.shape[1]}")
    if k > len(rows):
        raise ChainExhaustedError(f"chain of length {k} from a pool of {len(rows)}")
    pool = list(range(len(rows)))
    positions, hops = [], []
    current = query_projected
    for _ in range(k):
        pos, d = nearest_in_pool(pool, rows, current, metric)
        pool.remove(pos)
        positions.append(pos)
        hops.append(d)
        current = rows[pos]
    positions = np.array(positions, dtype=np.int64)
    row_idx = sample.row_indices[positions]
    return ChainResult(positions, row_idx, train.labels[row_idx], np.array(hops))


def base_predict(chain: ChainResult) -> tuple[int, float]:
    """Majority of the chain labels; an even split goes to the first hop's label."""
    labels = np.asarray(chain.labels)
    k = len(labels)
    ones = int(labels.sum())
    if 2 * ones > k:
        label = 1
    elif 2 * ones < k:
        label = 0
    else:
        label = int(labels[0])
    return label, ones / k


def predict(model: ExNRuleModel, query, workers: int = 1) -> Prediction:
    query = np.asarray(query, dtype=np.float64)
    if query.ndim != 1:
        raise DimensionMismatchError("predict takes a single query vector")
    return predict_batch(model, query[None, :], workers)[0]


def predict_batch(model: ExNRuleModel, queries, workers: int = 1) -> list[Prediction]:
    labels, probs, votes = model.predict_arrays(queries, workers, keep_votes=True)
    return [Prediction(int(l), float(p), tuple(int(v) for v in vs))
            for l, p, vs in zip(labels, probs, votes)]
