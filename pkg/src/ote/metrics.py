"""Evaluation statistics: misclassification, Brier score, sensitivity, kappa.

Class 1 is the positive class throughout (fixed at ingestion by the
dataset's positive_label mapping).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def _as_labels(v, name: str) -> np.ndarray:
    raw = np.asarray(v)
    if raw.ndim != 1 or raw.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-d vector")
    arr = raw.astype(np.int64)
    if raw.dtype.kind == "f" and (arr != raw).any():
        raise ValueError(f"{name} must contain only 0/1 labels, got fractional values")
    if not np.isin(arr, (0, 1)).all():
        raise ValueError(f"{name} must contain only 0/1 labels")
    return arr


def _check_lengths(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")


def confusion_matrix(predicted, truth) -> ConfusionMatrix:
    p = _as_labels(predicted, "predicted")
    t = _as_labels(truth, "truth")
    _check_lengths(p, t)
    return ConfusionMatrix(
        tp=int(((p == 1) & (t == 1)).sum()),
        fp=int(((p == 1) & (t == 0)).sum()),
        tn=int(((p == 0) & (t == 0)).sum()),
        fn=int(((p == 0) & (t == 1)).sum()),
    )


def misclassification(predicted, truth) -> float:
    """Fraction of positions where the label vectors differ."""
    p = _as_labels(predicted, "predicted")
    t = _as_labels(truth, "truth")
    _check_lengths(p, t)
    return float(np.mean(p != t))


def brier_score(probas, truth) -> float:
    """Mean of (y_i - p_i)^2 over predicted class-1 probabilities."""
    p = np.asarray(probas, dtype=np.float64)
    t = _as_labels(truth, "truth")
    if p.ndim != 1 or p.size == 0:
        raise ValueError("probas must be a non-empty 1-d vector")
    _check_lengths(p, t)
    if ((p < 0) | (p > 1)).any():
        raise ValueError("probas must lie in [0, 1]")
    return float(np.mean((t - p) ** 2))


def sensitivity(predicted, truth) -> float:
    """True-positive rate tp/(tp+fn). Undefined without positive rows."""
    cm = confusion_matrix(predicted, truth)
    if cm.tp + cm.fn == 0:
        raise ValueError("sensitivity undefined: no positive rows in truth")
    return cm.tp / (cm.tp + cm.fn)


def kappa(predicted, truth) -> float:
    """Cohen's kappa: (p_o - p_e) / (1 - p_e).

    Observed agreement p_o is 1 minus the misclassification rate; expected
    agreement p_e comes from the marginal label frequencies of the two
    vectors. Undefined (raises) when p_e = 1, i.e. both vectors are
    constant and agree.
    """
    p = _as_labels(predicted, "predicted")
    t = _as_labels(truth, "truth")
    _check_lengths(p, t)
    n = p.shape[0]
    p_o = float(np.mean(p == t))
    p1_pred = float(np.mean(p))
    p1_true = float(np.mean(t))
    p_e = p1_pred * p1_true + (1.0 - p1_pred) * (1.0 - p1_true)
    if p_e == 1.0:
        raise ValueError("kappa undefined: both vectors constant and equal")
    return (p_o - p_e) / (1.0 - p_e)
