"""Accuracy, Cohen's kappa and the binary Brier score."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatchError, NonBinaryLabelError, ProbOutOfRangeError


def _labels(pred, truth) -> tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.ndim != 1 or pred.shape != truth.shape or pred.size == 0:
        raise LengthMismatchError(f"label vectors of shape {pred.shape} and {truth.shape}")
    for v in (pred, truth):
        if not np.all((v == 0) | (v == 1)):
            raise NonBinaryLabelError("labels must be 0 or 1")
    return pred.astype(np.int64), truth.astype(np.int64)


def accuracy(pred_labels, true_labels) -> float:
    pred, truth = _labels(pred_labels, true_labels)
    return float(np.mean(pred == truth))


def confusion(pred_labels, true_labels) -> np.ndarray:
    """2x2 counts, rows = truth, columns = prediction."""
    pred, truth = _labels(pred_labels, true_labels)
    return np.bincount(2 * truth + pred, minlength=4).reshape(2, 2)


def cohen_kappa(pred_labels, true_labels) -> float:
    """(p_o - p_e) / (1 - p_e).

    When chance agreement is 1 (both vectors constant and equal) the result is
    1; two different constant vectors give 0.
    """
    cm = confusion(pred_labels, true_labels)
    n = cm.sum()
    p_o = np.trace(cm) / n
    p_e = float(cm.sum(axis=1) @ cm.sum(axis=0)) / n**2
    if p_e == 1.0:
        return 1.0
    if cm.sum(axis=1).max() == n and cm.sum(axis=0).max() == n:
        return 0.0
    return float((p_o - p_e) / (1.0 - p_e))


def brier_score(prob_class1, true_labels) -> float:
    """Mean of ``(p - y)**2``; single-probability form, range [0, 1]."""
    prob = np.asarray(prob_class1, dtype=np.float64)
    truth = np.asarray(true_labels)
    if prob.ndim != 1 or prob.shape != truth.shape or prob.size == 0:
        raise LengthMismatchError(f"vectors of shape {prob.shape} and {truth.shape}")
    if not np.all((prob >= 0.0) & (prob <= 1.0)):
        raise ProbOutOfRangeError("probabilities must lie in [0, 1]")
    if not np.all((truth == 0) | (truth == 1)):
        raise NonBinaryLabelError("labels must be 0 or 1")
    return float(np.mean((prob - truth) ** 2))


@dataclass(frozen=True)
class EvalRecord:
    method: str
    dataset: str
    repetition: int
    k: int
    k_used: int
    partition_hash: str
    accuracy: float
    kappa: float
    brier: float

    def __post_init__(self):
        if not (0.0 <= self.accuracy <= 1.0 and -1.0 <= self.kappa <= 1.0 and 0.0 <= self.brier <= 1.0):
            raise ValueError(f"metric out of range in {self}")

    @classmethod
    def score(cls, method, dataset, repetition, k, k_used, partition_hash, labels, probs, truth):
        return cls(method, dataset, repetition, k, k_used, partition_hash,
                   accuracy(labels, truth), cohen_kappa(labels, truth), brier_score(probs, truth))
