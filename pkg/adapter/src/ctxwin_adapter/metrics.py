"""Metrics JSON emission matching the shared evaluation contract.

Field names and semantics mirror the dataset producer's metrics module:
per-class entries are null when a class has neither true nor predicted
examples, macro F1 averages classes with support, and weighted recall is
trace/total so it equals accuracy exactly.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import numpy as np

from .data import LABELS

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


def confusion_matrix(y_true: Sequence[int], y_pred: Sequence[int]) -> np.ndarray:
    counts = np.zeros((len(LABELS), len(LABELS)), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        counts[t, p] += 1
    return counts


def metrics_dict(
    counts: np.ndarray, model: str, strategy: str, epoch: int, seed: int
) -> dict:
    total = int(counts.sum())
    if total == 0:
        raise ValueError("empty evaluation set")
    trace = int(np.trace(counts))
    per_class: dict[str, dict | None] = {}
    weighted_precision = 0.0
    weighted_f1 = 0.0
    macro_sum = 0.0
    present = 0
    for i, label in enumerate(LABELS):
        tp = int(counts[i, i])
        support = int(counts[i, :].sum())
        predicted = int(counts[:, i].sum())
        if support == 0 and predicted == 0:
            per_class[label] = None
            continue
        precision = tp / predicted if predicted else 0.0
        recall = tp / support if support else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[label] = {
            "precision": precision,
            "recall": recall,
            "f1": f1,
            "support": support,
        }
        weighted_precision += support * precision
        weighted_f1 += support * f1
        if support:
            macro_sum += f1
            present += 1
    return {
        "model": model,
        "strategy": strategy,
        "epoch": epoch,
        "accuracy": trace / total,
        "precision_w": weighted_precision / total,
        "recall_w": trace / total,
        "f1_w": weighted_f1 / total,
        "f1_macro": macro_sum / present if present else 0.0,
        "per_class": per_class,
        "seed": seed,
    }


def write_metrics(payload: dict, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return path
