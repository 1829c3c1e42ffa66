"""Confusion-matrix metrics for the 4-way classification task.

Per-class precision/recall/F1 use zero-division-to-zero semantics; classes
with no true examples are reported as absent (None) and excluded from the
macro average.  Weighted recall is computed as trace/total, which makes the
weighted-recall = accuracy identity hold exactly, not just in expectation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import CLASS_LABELS
from .errors import CtxwinError

N_CLASSES = len(CLASS_LABELS)


class ConfusionMatrix:
    """4x4 count matrix; rows are true classes, columns predictions."""

    def __init__(self, counts: np.ndarray | Sequence[Sequence[int]]):
        counts = np.asarray(counts)
        if counts.shape != (N_CLASSES, N_CLASSES):
            raise CtxwinError(f"confusion matrix must be {N_CLASSES}x{N_CLASSES}")
        if np.any(counts < 0) or not np.issubdtype(counts.dtype, np.integer):
            raise CtxwinError("confusion matrix entries must be non-negative integers")
        self.counts = counts.astype(np.int64)

    @classmethod
    def from_predictions(cls, y_true: Iterable[int], y_pred: Iterable[int]) -> "ConfusionMatrix":
        counts = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
        for t, p in zip(y_true, y_pred, strict=True):
            counts[t, p] += 1
        return cls(counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ConfusionMatrix) and np.array_equal(self.counts, other.counts)

    def __repr__(self) -> str:
        return f"ConfusionMatrix({self.counts.tolist()})"


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    per_class: tuple[ClassMetrics | None, ...]
    precision_weighted: float
    recall_weighted: float
    f1_weighted: float
    f1_macro: float


def compute_metrics(cm: ConfusionMatrix) -> MetricsReport:
    counts = cm.counts
    total = cm.total
    if total == 0:
        raise CtxwinError("cannot compute metrics for an empty confusion matrix")

    trace = int(np.trace(counts))
    accuracy = trace / total

    per_class: list[ClassMetrics | None] = []
    weighted_precision = 0.0
    weighted_f1 = 0.0
    macro_f1_sum = 0.0
    present = 0
    for i in range(N_CLASSES):
        tp = int(counts[i, i])
        support = int(counts[i, :].sum())
        predicted = int(counts[:, i].sum())
        if support == 0 and predicted == 0:
            per_class.append(None)
            continue
        precision = tp / predicted if predicted else 0.0
        recall = tp / support if support else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class.append(ClassMetrics(precision=precision, recall=recall, f1=f1, support=support))
        weighted_precision += support * precision
        weighted_f1 += support * f1
        if support:
            macro_f1_sum += f1
            present += 1

    return MetricsReport(
        accuracy=accuracy,
        per_class=tuple(per_class),
        precision_weighted=weighted_precision / total,
        recall_weighted=trace / total,
        f1_weighted=weighted_f1 / total,
        f1_macro=macro_f1_sum / present if present else 0.0,
    )


# --------------------------------------------------------------------------
# metrics JSON contract

METRICS_KEYS = (
    "model",
    "strategy",
    "epoch",
    "accuracy",
    "precision_w",
    "recall_w",
    "f1_w",
    "f1_macro",
    "per_class",
    "seed",
)


def metrics_to_json_dict(
    report: MetricsReport, model: str, strategy: str, epoch: int, seed: int
) -> dict:
    per_class = {}
    for label, cm in zip(CLASS_LABELS, report.per_class):
        if cm is None:
            per_class[label.value] = None
        else:
            per_class[label.value] = {
                "precision": cm.precision,
                "recall": cm.recall,
                "f1": cm.f1,
                "support": cm.support,
            }
    return {
        "model": model,
        "strategy": strategy,
        "epoch": epoch,
        "accuracy": report.accuracy,
        "precision_w": report.precision_weighted,
        "recall_w": report.recall_weighted,
        "f1_w": report.f1_weighted,
        "f1_macro": report.f1_macro,
        "per_class": per_class,
        "seed": seed,
    }


def write_metrics_json(
    report: MetricsReport,
    path: str | Path,
    model: str,
    strategy: str,
    epoch: int,
    seed: int,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = metrics_to_json_dict(report, model=model, strategy=strategy, epoch=epoch, seed=seed)
    path.write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


def read_metrics_json(path: str | Path) -> dict:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    missing = [k for k in METRICS_KEYS if k not in obj]
    if missing:
        raise CtxwinError(f"metrics file {path} missing keys: {', '.join(missing)}")
    return obj


def report_from_json_dict(obj: dict) -> MetricsReport:
    per_class = []
    for label in CLASS_LABELS:
        entry = obj["per_class"].get(label.value)
        if entry is None:
            per_class.append(None)
        else:
            per_class.append(
                ClassMetrics(
                    precision=float(entry["precision"]),
                    recall=float(entry["recall"]),
                    f1=float(entry["f1"]),
                    support=int(entry["support"]),
                )
            )
    return MetricsReport(
        accuracy=float(obj["accuracy"]),
        per_class=tuple(per_class),
        precision_weighted=float(obj["precision_w"]),
        recall_weighted=float(obj["recall_w"]),
        f1_weighted=float(obj["f1_w"]),
        f1_macro=float(obj["f1_macro"]),
    )
