"""Adapter configuration: one JSON file, mirrored by CLI flags."""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path


@dataclass(frozen=True)
class AdapterConfig:
    """Settings for one fine-tuning run.

    Learning rate, batch size, and optimizer choice are exposed here
    because no reference values exist for them; the defaults are the
    library's customary fine-tuning settings and should be treated as
    assumptions.
    """

    train_path: str
    eval_path: str
    out_dir: str
    checkpoint: str = "distilbert-base-uncased-finetuned-sst-2-english"
    max_length: int = 128
    epochs: int = 10
    seed: int = 42
    batch_size: int = 16
    learning_rate: float = 5e-5
    weight_decay: float = 0.0
    segment_tags: tuple[str, str, str, str] = ("[CTXB]", "[ARG1]", "[ARG2]", "[CTXA]")
    strategy: str = "unknown"
    model_name: str = "distilbert"
    device: str = "auto"

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.max_length < 8:
            raise ValueError(f"max_length too small: {self.max_length}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if len(set(self.segment_tags)) != 4:
            raise ValueError("segment_tags must be four distinct strings")

    @classmethod
    def from_json(cls, path: str | Path, **overrides) -> "AdapterConfig":
        settings = json.loads(Path(path).read_text(encoding="utf-8"))
        known = {f.name for f in fields(cls)}
        unknown = set(settings) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        settings.update({k: v for k, v in overrides.items() if v is not None})
        if "segment_tags" in settings:
            settings["segment_tags"] = tuple(settings["segment_tags"])
        return cls(**settings)
