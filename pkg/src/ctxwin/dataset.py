"""Section splits, fixed-length token encoding, and the JSONL exchange format.

The JSONL schema (one example per line, UTF-8, LF) is the contract shared
with external trainers:

    {"context_before": [str], "arg1": str, "arg2": str,
     "context_after": [str], "label": "Temporal|Contingency|Comparison|Expansion",
     "section": int, "file": int, "arg2_first": int}

``arg2_first`` (the origin sentence index of arg2) is optional on ingest;
readers must ignore keys they do not know.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import IO

from .corpus import ClassLabel, CLASS_INDEX, MAX_SECTION, MIN_SECTION
from .errors import ConfigError, SchemaError
from .stopwords import STOPWORDS
from .windowing import Dataset, Example

_CLASS_BY_NAME = {label.value: label for label in ClassLabel}


@dataclass(frozen=True)
class SplitSpec:
    """Document sections routed to train and test; the rest is dropped."""

    train_sections: frozenset[int] = frozenset(range(0, 23))
    test_sections: frozenset[int] = frozenset({23})

    def __post_init__(self):
        overlap = self.train_sections & self.test_sections
        if overlap:
            raise ConfigError(f"train/test sections overlap: {sorted(overlap)}")
        for section in self.train_sections | self.test_sections:
            if not MIN_SECTION <= section <= MAX_SECTION:
                raise ConfigError(
                    f"section {section} outside {MIN_SECTION}..{MAX_SECTION}"
                )


@dataclass(frozen=True)
class SplitResult:
    train: Dataset
    test: Dataset
    dropped: int


def split(dataset: Dataset, spec: SplitSpec = SplitSpec()) -> SplitResult:
    """Partition a dataset by origin section.  |train|+|test|+dropped = |dataset|."""
    train = []
    test = []
    dropped = 0
    for example in dataset.examples:
        if example.section in spec.train_sections:
            train.append(example)
        elif example.section in spec.test_sections:
            test.append(example)
        else:
            dropped += 1
    return SplitResult(
        train=Dataset(strategy=dataset.strategy, examples=tuple(train)),
        test=Dataset(strategy=dataset.strategy, examples=tuple(test)),
        dropped=dropped,
    )


# --------------------------------------------------------------------------
# encoding

_TOKEN_RE = re.compile(r"\w+|[^\w\s]")


def tokenize(text: str, keep_stopwords: bool = True) -> list[str]:
    """Lowercased word/punctuation tokens, optionally stop-word filtered."""
    tokens = _TOKEN_RE.findall(text.lower())
    if keep_stopwords:
        return tokens
    return [t for t in tokens if t not in STOPWORDS]


@dataclass(frozen=True)
class EncodingSpec:
    max_length: int = 128
    pad_token: str = "[PAD]"
    segment_tags: tuple[str, str, str, str] = ("[CTXB]", "[ARG1]", "[ARG2]", "[CTXA]")
    keep_stopwords: bool = True

    def __post_init__(self):
        if self.max_length <= 0:
            raise ConfigError(f"max_length must be positive, got {self.max_length}")
        tags = list(self.segment_tags)
        if len(set(tags)) != 4 or any(not t for t in tags):
            raise ConfigError(f"segment tags must be four distinct non-empty strings: {tags}")
        if self.pad_token in tags or not self.pad_token:
            raise ConfigError("pad token must be non-empty and distinct from tags")


@dataclass(frozen=True)
class EncodedExample:
    tokens: tuple[str, ...]
    mask: tuple[int, ...]
    label_index: int

    def __post_init__(self):
        if len(self.tokens) != len(self.mask):
            raise ConfigError("tokens and mask lengths differ")

    def real_tokens(self) -> tuple[str, ...]:
        return tuple(t for t, m in zip(self.tokens, self.mask) if m)


def encode(example: Example, spec: EncodingSpec = EncodingSpec()) -> EncodedExample:
    """Fixed-length token encoding with segment tags.

    Segments appear in document order (context-before, arg1, arg2,
    context-after), each preceded by its tag; context tags are emitted only
    when that context is present.  Overflow is trimmed from the left of the
    leading context and the right of the trailing context before any
    argument content is touched; tags are never trimmed while content
    remains.
    """
    if not example.arg1.strip() or not example.arg2.strip():
        raise ConfigError("examples must have non-empty arg1 and arg2")
    keep = spec.keep_stopwords
    tag_cb, tag_a1, tag_a2, tag_ca = spec.segment_tags

    cb = [t for text in example.context_before for t in tokenize(text, keep)]
    a1 = tokenize(example.arg1, keep)
    a2 = tokenize(example.arg2, keep)
    ca = [t for text in example.context_after for t in tokenize(text, keep)]

    tags = int(bool(example.context_before)) + 2 + int(bool(example.context_after))
    overflow = tags + len(cb) + len(a1) + len(a2) + len(ca) - spec.max_length
    for segment, from_left in ((cb, True), (ca, False), (a2, False), (a1, False)):
        if overflow <= 0:
            break
        cut = min(overflow, len(segment))
        if from_left:
            del segment[:cut]
        else:
            del segment[len(segment) - cut:]
        overflow -= cut

    sequence: list[str] = []
    if example.context_before:
        sequence.append(tag_cb)
        sequence.extend(cb)
    sequence.append(tag_a1)
    sequence.extend(a1)
    sequence.append(tag_a2)
    sequence.extend(a2)
    if example.context_after:
        sequence.append(tag_ca)
        sequence.extend(ca)
    # tag overflow on degenerate budgets: fall back to a plain tail cut
    sequence = sequence[: spec.max_length]

    real = len(sequence)
    padded = sequence + [spec.pad_token] * (spec.max_length - real)
    mask = [1] * real + [0] * (spec.max_length - real)
    return EncodedExample(
        tokens=tuple(padded), mask=tuple(mask), label_index=CLASS_INDEX[example.label]
    )


def encode_dataset(
    dataset: Dataset, spec: EncodingSpec = EncodingSpec()
) -> list[EncodedExample]:
    return [encode(example, spec) for example in dataset.examples]


# --------------------------------------------------------------------------
# JSONL exchange format

_REQUIRED_KEYS = ("context_before", "arg1", "arg2", "context_after", "label", "section", "file")


def example_to_dict(example: Example) -> dict:
    return {
        "context_before": list(example.context_before),
        "arg1": example.arg1,
        "arg2": example.arg2,
        "context_after": list(example.context_after),
        "label": example.label.value,
        "section": example.section,
        "file": example.file,
        "arg2_first": example.arg2_first,
    }


def example_from_dict(obj: object, line: int | None = None) -> Example:
    if not isinstance(obj, dict):
        raise SchemaError("example record is not a JSON object", line)
    missing = [k for k in _REQUIRED_KEYS if k not in obj]
    if missing:
        raise SchemaError(f"missing keys: {', '.join(missing)}", line)
    label = _CLASS_BY_NAME.get(obj["label"])
    if label is None:
        raise SchemaError(f"unknown label {obj['label']!r}", line)
    for key in ("context_before", "context_after"):
        value = obj[key]
        if not isinstance(value, list) or not all(isinstance(t, str) for t in value):
            raise SchemaError(f"{key} must be a list of strings", line)
    for key in ("arg1", "arg2"):
        if not isinstance(obj[key], str):
            raise SchemaError(f"{key} must be a string", line)
    for key in ("section", "file"):
        if not isinstance(obj[key], int):
            raise SchemaError(f"{key} must be an integer", line)
    arg2_first = obj.get("arg2_first", -1)
    if not isinstance(arg2_first, int):
        raise SchemaError("arg2_first must be an integer", line)
    return Example(
        context_before=tuple(obj["context_before"]),
        arg1=obj["arg1"],
        arg2=obj["arg2"],
        context_after=tuple(obj["context_after"]),
        label=label,
        section=obj["section"],
        file=obj["file"],
        arg2_first=arg2_first,
    )


def emit_jsonl(dataset: Dataset, path: str | Path) -> Path:
    """Write one example per line with a stable field order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        for example in dataset.examples:
            handle.write(
                json.dumps(example_to_dict(example), ensure_ascii=False, separators=(",", ":"))
            )
            handle.write("\n")
    return path


def ingest_jsonl(source: str | Path | IO, strategy: str = "unknown") -> Dataset:
    """Read a JSONL dataset, validating each line against the schema."""
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    examples = []
    for line_no, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc.msg}", line_no) from None
        examples.append(example_from_dict(obj, line_no))
    return Dataset(strategy=strategy, examples=tuple(examples))
