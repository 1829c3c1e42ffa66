"""Transformer fine-tuning adapter for ctxwin datasets.

Reads the dataset JSONL contract, fine-tunes a pretrained sequence
classifier with a 4-way head, and writes per-epoch metrics JSON files in
the shared contract so runs plug into ``ctxwin compare`` and
``ctxwin report``.
"""

__version__ = "0.1.0"

from .config import AdapterConfig
from .data import LABELS, build_input_text, load_examples
from .finetune import finetune_and_eval

__all__ = [
    "AdapterConfig",
    "LABELS",
    "build_input_text",
    "load_examples",
    "finetune_and_eval",
]
