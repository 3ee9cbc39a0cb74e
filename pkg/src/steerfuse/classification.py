"""Multi-class classification reporting: confusion matrix, per-class
precision/recall/F1/support, accuracy, and macro / support-weighted
averages. Empty classes follow the 0/0 -> 0 convention so synthetic runs
with absent bins never produce NaNs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .validation import ValidationError


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with rows = true class, columns = predicted class."""

    counts: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.counts)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"confusion matrix must be square, got shape {m.shape}")
        if not np.issubdtype(m.dtype, np.integer):
            if not np.all(m == np.floor(m)):
                raise ValidationError("confusion matrix counts must be integers")
            m = m.astype(np.int64)
        if np.any(m < 0):
            raise ValidationError("confusion matrix counts must be non-negative")
        if m.sum() < 1:
            raise ValidationError("confusion matrix must contain at least one count")
        m = m.astype(np.int64)
        m.flags.writeable = False
        object.__setattr__(self, "counts", m)

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class ClassReport:
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    support: np.ndarray
    accuracy: float
    macro_avg: dict
    weighted_avg: dict


def confusion(true_labels, pred_labels, n_bins: int) -> ConfusionMatrix:
    """Tally a confusion matrix from parallel label sequences."""
    t = np.asarray(true_labels)
    p = np.asarray(pred_labels)
    if t.ndim != 1 or p.ndim != 1 or t.shape != p.shape:
        raise ValidationError(f"label sequences must be equal-length 1-D, got {t.shape} vs {p.shape}")
    if t.size == 0:
        raise ValidationError("label sequences must be non-empty")
    for name, labels in (("true", t), ("pred", p)):
        if not np.issubdtype(labels.dtype, np.integer):
            raise ValidationError(f"{name} labels must be integers")
        if labels.min() < 0 or labels.max() >= n_bins:
            raise ValidationError(
                f"{name} labels must lie in [0, {n_bins - 1}], got range "
                f"[{labels.min()}, {labels.max()}]"
            )
    counts = np.zeros((n_bins, n_bins), dtype=np.int64)
    np.add.at(counts, (t, p), 1)
    return ConfusionMatrix(counts=counts)


def _safe_div(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.zeros_like(num, dtype=float)
    nz = den > 0
    out[nz] = num[nz] / den[nz]
    return out


def report(m: ConfusionMatrix) -> ClassReport:
    """Per-class and aggregate rates from a confusion matrix.

    precision_c = diagonal / column sum, recall_c = diagonal / row sum,
    f1 = harmonic mean, each with 0/0 defined as 0. The weighted average
    uses per-class support (row sums) as weights; weighted recall equals
    accuracy by construction.
    """
    counts = m.counts
    diag = np.diag(counts).astype(float)
    support = counts.sum(axis=1)
    colsum = counts.sum(axis=0).astype(float)
    precision = _safe_div(diag, colsum)
    recall = _safe_div(diag, support.astype(float))
    f1 = _safe_div(2.0 * precision * recall, precision + recall)
    total = float(m.total)
    accuracy = float(diag.sum() / total)
    macro_avg = {
        "precision": float(precision.mean()),
        "recall": float(recall.mean()),
        "f1": float(f1.mean()),
    }
    w = support / total
    weighted_avg = {
        "precision": float(np.dot(precision, w)),
        "recall": float(np.dot(recall, w)),
        "f1": float(np.dot(f1, w)),
    }
    return ClassReport(
        precision=precision,
        recall=recall,
        f1=f1,
        support=support,
        accuracy=accuracy,
        macro_avg=macro_avg,
        weighted_avg=weighted_avg,
    )
