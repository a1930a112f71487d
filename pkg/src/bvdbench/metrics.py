"""Confusion-matrix statistics and ROC-AUC for binary classifiers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "fp", "tn", "fn"):
            v = getattr(self, name)
            if v < 0 or int(v) != v:
                raise ValueError(f"{name} must be a non-negative integer, got {v}")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class MetricSummary:
    """Derived rates in [0, 1]; None marks an undefined (0/0) value."""

    ppv: Optional[float]
    sensitivity: Optional[float]
    f1: Optional[float]
    fpr: Optional[float]


def confusion(predicted, actual) -> ConfusionMatrix:
    pred = np.asarray(predicted, dtype=int)
    act = np.asarray(actual, dtype=int)
    if pred.shape != act.shape or pred.ndim != 1:
        raise ValueError(f"length mismatch: {pred.shape} predictions vs {act.shape} labels")
    if pred.size == 0:
        raise ValueError("need at least one observation")
    for arr, what in ((pred, "predictions"), (act, "labels")):
        if not np.all((arr == 0) | (arr == 1)):
            raise ValueError(f"{what} must be 0 or 1")
    tp = int(np.sum((pred == 1) & (act == 1)))
    fp = int(np.sum((pred == 1) & (act == 0)))
    tn = int(np.sum((pred == 0) & (act == 0)))
    fn = int(np.sum((pred == 0) & (act == 1)))
    return ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)


def _ratio(num: int, den: int) -> Optional[float]:
    return None if den == 0 else num / den


def summarize(cm: ConfusionMatrix) -> MetricSummary:
    ppv = _ratio(cm.tp, cm.tp + cm.fp)
    sens = _ratio(cm.tp, cm.tp + cm.fn)
    fpr = _ratio(cm.fp, cm.fp + cm.tn)
    if ppv is None or sens is None or ppv + sens == 0:
        f1 = None
    else:
        f1 = 2 * ppv * sens / (ppv + sens)
    return MetricSummary(ppv=ppv, sensitivity=sens, f1=f1, fpr=fpr)


def roc_auc(scores, labels) -> float:
    """Probability a random positive outscores a random negative, ties counted half.

    Computed from midranks, which is exactly the pairwise win/tie count in
    O(n log n).
    """
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=int)
    if s.shape != y.shape or s.ndim != 1:
        raise ValueError("scores and labels must be 1-D and the same length")
    if not np.all(np.isfinite(s)):
        raise ValueError("scores must be finite")
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise ValueError("need at least one positive and one negative label")

    order = np.argsort(s, kind="mergesort")
    sorted_scores = s[order]
    # midranks: tied scores all get the mean of the ranks they occupy
    _, inverse, counts = np.unique(sorted_scores, return_inverse=True, return_counts=True)
    ends = np.cumsum(counts)
    starts = ends - counts + 1
    midranks_sorted = (starts + ends)[inverse] / 2.0
    ranks = np.empty(s.size)
    ranks[order] = midranks_sorted

    rank_sum = ranks[y == 1].sum()
    u = rank_sum - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))
