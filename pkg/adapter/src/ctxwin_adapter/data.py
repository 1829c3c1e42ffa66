"""Dataset JSONL loading against the shared exchange contract."""

from __future__ import annotations

import json
from pathlib import Path

# fixed label order shared with the dataset producer
LABELS = ("Temporal", "Contingency", "Comparison", "Expansion")
LABEL_TO_INDEX = {label: i for i, label in enumerate(LABELS)}

_REQUIRED = ("context_before", "arg1", "arg2", "context_after", "label", "section", "file")


class SchemaError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def load_examples(path: str | Path) -> list[dict]:
    """One validated example dict per JSONL line; unknown keys are ignored."""
    examples = []
    text = Path(path).read_text(encoding="utf-8")
    for line_no, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc.msg}", line_no) from None
        if not isinstance(obj, dict):
            raise SchemaError("record is not a JSON object", line_no)
        missing = [key for key in _REQUIRED if key not in obj]
        if missing:
            raise SchemaError(f"missing keys: {', '.join(missing)}", line_no)
        if obj["label"] not in LABEL_TO_INDEX:
            raise SchemaError(
                f"label {obj['label']!r} outside the 4-way set {LABELS}", line_no
            )
        for key in ("context_before", "context_after"):
            value = obj[key]
            if not isinstance(value, list) or not all(isinstance(t, str) for t in value):
                raise SchemaError(f"{key} must be a list of strings", line_no)
        if not isinstance(obj["arg1"], str) or not isinstance(obj["arg2"], str):
            raise SchemaError("arg1 and arg2 must be strings", line_no)
        examples.append({key: obj[key] for key in _REQUIRED})
    return examples


def build_input_text(example: dict, tags: tuple[str, str, str, str]) -> str:
    """Linearize an example the same way the dataset producer encodes it.

    Context tags appear only when that context is present; argument tags
    always appear.
    """
    tag_cb, tag_a1, tag_a2, tag_ca = tags
    parts: list[str] = []
    if example["context_before"]:
        parts.append(tag_cb)
        parts.extend(example["context_before"])
    parts.append(tag_a1)
    parts.append(example["arg1"])
    parts.append(tag_a2)
    parts.append(example["arg2"])
    if example["context_after"]:
        parts.append(tag_ca)
        parts.extend(example["context_after"])
    return " ".join(parts)
