"""Per-epoch metric reports: delimited table plus rendered figures."""

from __future__ import annotations

import csv
import re
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .errors import CtxwinError
from .metrics import read_metrics_json

_EPOCH_FILE = re.compile(r"metrics_epoch_(\d+)\.json$")

_CURVES = (
    ("accuracy", "Accuracy by epoch", "accuracy.png"),
    ("f1_w", "Weighted F1 by epoch", "f1_weighted.png"),
    ("f1_macro", "Macro F1 by epoch", "f1_macro.png"),
)

_TABLE_FIELDS = (
    "run",
    "model",
    "strategy",
    "seed",
    "epoch",
    "accuracy",
    "precision_w",
    "recall_w",
    "f1_w",
    "f1_macro",
)


def collect_epoch_metrics(run_dir: str | Path) -> list[dict]:
    """All per-epoch metrics files under a run directory, ordered by epoch."""
    run_dir = Path(run_dir)
    found = []
    for path in sorted(run_dir.rglob("metrics_epoch_*.json")):
        match = _EPOCH_FILE.search(path.name)
        if match:
            found.append((int(match.group(1)), path))
    return [read_metrics_json(path) for _, path in sorted(found)]


def collect_final_metrics(run_dir: str | Path) -> list[dict]:
    """All final-epoch metrics files under a directory, in path order."""
    run_dir = Path(run_dir)
    paths = sorted(run_dir.rglob("metrics_final.json"))
    if run_dir.is_file():
        paths = [run_dir]
    return [read_metrics_json(path) for path in paths]


def write_report(run_dirs: list[str | Path], out_dir: str | Path) -> list[Path]:
    """Write metrics.csv plus one figure per tracked metric.

    Each run directory becomes one labeled series per figure; the delimited
    table holds every per-epoch row alongside the figures.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    series: list[tuple[str, list[dict]]] = []
    for run_dir in run_dirs:
        rows = collect_epoch_metrics(run_dir)
        if not rows:
            raise CtxwinError(f"no metrics_epoch_*.json files under {run_dir}")
        series.append((Path(run_dir).name, rows))

    table_path = out_dir / "metrics.csv"
    with table_path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=_TABLE_FIELDS)
        writer.writeheader()
        for run_name, rows in series:
            for row in rows:
                writer.writerow({"run": run_name, **{k: row[k] for k in _TABLE_FIELDS[1:]}})
    written = [table_path]

    for key, title, filename in _CURVES:
        fig, ax = plt.subplots(figsize=(6, 4))
        for run_name, rows in series:
            epochs = [row["epoch"] for row in rows]
            values = [row[key] for row in rows]
            ax.plot(epochs, values, marker="o", label=run_name)
        ax.set_xlabel("epoch")
        ax.set_ylabel(key)
        ax.set_title(title)
        ax.set_ylim(0.0, 1.0)
        ax.legend(loc="best", fontsize="small")
        fig.tight_layout()
        path = out_dir / filename
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written
