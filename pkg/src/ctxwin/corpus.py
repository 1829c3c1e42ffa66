"""Corpus model for PDTB-style discourse annotations.

A corpus is a set of documents keyed by (section, file).  Each document
holds indexed sentences and discourse relation records.  Two serialized
forms are supported:

* ``pipe``: one relation per line, ``|``-separated fields (see
  docs/formats.md for field positions), with an optional sentence
  sidecar file in the same style;
* ``record-json``: one JSON object per line mirroring the pipe fields,
  with a JSONL sentence sidecar.

When no sentence sidecar is given, the sentence inventory is
reconstructed from the relation arguments themselves: each argument
anchors its text at the first sentence index of its span, and the
longest text seen for an index wins.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator, Mapping

from .errors import CorpusInvariantError, ParseError, UnknownClassError


class ClassLabel(enum.Enum):
    """Top-level 4-way relation classes, in fixed index order."""

    TEMPORAL = "Temporal"
    CONTINGENCY = "Contingency"
    COMPARISON = "Comparison"
    EXPANSION = "Expansion"


CLASS_LABELS: tuple[ClassLabel, ...] = tuple(ClassLabel)
CLASS_INDEX: Mapping[ClassLabel, int] = {label: i for i, label in enumerate(CLASS_LABELS)}
_CLASS_BY_NAME = {label.value: label for label in CLASS_LABELS}


class RelationKind(enum.Enum):
    IMPLICIT = "Implicit"
    EXPLICIT = "Explicit"
    ENTREL = "EntRel"
    ALTLEX = "AltLex"
    NOREL = "NoRel"


_KIND_BY_NAME = {kind.value: kind for kind in RelationKind}

# Kinds that must carry at least one sense string.
SENSE_BEARING_KINDS = frozenset({RelationKind.IMPLICIT, RelationKind.EXPLICIT})

MIN_SECTION = 0
MAX_SECTION = 24


def extract_class(sense: str) -> ClassLabel:
    """Map a sense string to its class via the segment before the first dot.

    >>> extract_class("Contingency.Cause.Reason").value
    'Contingency'
    """
    if not sense:
        raise UnknownClassError(sense)
    head = sense.split(".", 1)[0].strip()
    try:
        return _CLASS_BY_NAME[head]
    except KeyError:
        raise UnknownClassError(sense) from None


@dataclass(frozen=True)
class SentenceRecord:
    section: int
    file: int
    sentence: int
    text: str


@dataclass(frozen=True)
class Argument:
    """One relation argument, normalized to whole-sentence granularity."""

    sentences: tuple[int, ...]
    text: str

    def __post_init__(self):
        if not self.sentences:
            raise CorpusInvariantError("argument with empty sentence span")
        if list(self.sentences) != sorted(set(self.sentences)):
            raise CorpusInvariantError(
                f"argument span must be strictly increasing: {self.sentences}"
            )
        if any(i < 0 for i in self.sentences):
            raise CorpusInvariantError(f"negative sentence index in span {self.sentences}")

    @property
    def first(self) -> int:
        return self.sentences[0]

    @property
    def last(self) -> int:
        return self.sentences[-1]


@dataclass(frozen=True)
class RelationRecord:
    kind: RelationKind
    senses: tuple[str, ...]
    section: int
    file: int
    arg1: Argument
    arg2: Argument

    def __post_init__(self):
        if self.kind in SENSE_BEARING_KINDS and not self.senses:
            raise CorpusInvariantError(f"{self.kind.value} relation with no senses")
        if self.arg1.first > self.arg2.first or self.arg1.last > self.arg2.last:
            raise CorpusInvariantError(
                f"arg1 {self.arg1.sentences} does not precede arg2 {self.arg2.sentences}"
            )

    def class_label(self) -> ClassLabel:
        """Class of the first listed sense (sense-bearing kinds only)."""
        if not self.senses:
            raise CorpusInvariantError(f"{self.kind.value} relation carries no class")
        return extract_class(self.senses[0])

    def has_class_conflict(self) -> bool:
        """True when two senses resolve to different classes (double annotation)."""
        if len(self.senses) < 2:
            return False
        classes = set()
        for sense in self.senses:
            try:
                classes.add(extract_class(sense))
            except UnknownClassError:
                continue
        return len(classes) > 1


@dataclass(frozen=True)
class Document:
    section: int
    file: int
    sentences: tuple[SentenceRecord, ...]
    relations: tuple[RelationRecord, ...]

    def __post_init__(self):
        indices = [s.sentence for s in self.sentences]
        if indices != sorted(indices):
            raise CorpusInvariantError(
                f"document ({self.section},{self.file}) sentences out of order"
            )
        if len(set(indices)) != len(indices):
            raise CorpusInvariantError(
                f"document ({self.section},{self.file}) has duplicate sentence indices"
            )
        for s in self.sentences:
            if (s.section, s.file) != (self.section, self.file):
                raise CorpusInvariantError(
                    f"sentence ({s.section},{s.file},{s.sentence}) filed in "
                    f"document ({self.section},{self.file})"
                )
        for r in self.relations:
            if (r.section, r.file) != (self.section, self.file):
                raise CorpusInvariantError("relation filed in the wrong document")

    def text_at(self, index: int) -> str | None:
        got = self._by_index().get(index)
        return got.text if got is not None else None

    def _by_index(self) -> dict[int, SentenceRecord]:
        cached = self.__dict__.get("_index_cache")
        if cached is None:
            cached = {s.sentence: s for s in self.sentences}
            object.__setattr__(self, "_index_cache", cached)
        return cached


@dataclass(frozen=True)
class Corpus:
    documents: Mapping[tuple[int, int], Document]

    def __post_init__(self):
        for key, doc in self.documents.items():
            if key != (doc.section, doc.file):
                raise CorpusInvariantError(f"document {key} keyed inconsistently")

    def ordered_documents(self) -> list[Document]:
        return [self.documents[key] for key in sorted(self.documents)]

    def relations(self) -> Iterator[RelationRecord]:
        for doc in self.ordered_documents():
            yield from doc.relations

    def implicit_relations(self) -> Iterator[RelationRecord]:
        return (r for r in self.relations() if r.kind is RelationKind.IMPLICIT)

    def relation_count(self, kind: RelationKind | None = None) -> int:
        if kind is None:
            return sum(len(d.relations) for d in self.documents.values())
        return sum(1 for r in self.relations() if r.kind is kind)

    def sentence_count(self) -> int:
        return sum(len(d.sentences) for d in self.documents.values())


@dataclass
class ParseReport:
    """Side channel for non-fatal findings during parsing."""

    documents: int = 0
    relations: int = 0
    sentences: int = 0
    double_class_relations: int = 0
    unparseable_senses: list[tuple[int, str]] = field(default_factory=list)
    skipped_lines: list[tuple[int, str]] = field(default_factory=list)


# --------------------------------------------------------------------------
# pipe format
#
# Relation line fields (0-based):
#   0 kind   1 section   2 file   3 senses (';'-joined)
#   4 arg1 sentence span (','-joined ints)   5 arg1 text
#   6 arg2 sentence span                     7 arg2 text
# Sentence sidecar line fields: 0 section  1 file  2 sentence  3 text
# '|', '\' and newlines inside fields are escaped as \p, \\ and \n.

_PIPE_FIELDS = 8
_SENTENCE_FIELDS = 4


def _escape(field_text: str) -> str:
    return (
        field_text.replace("\\", "\\\\")
        .replace("|", "\\p")
        .replace("\n", "\\n")
    )


def _unescape(field_text: str, line: int) -> str:
    out: list[str] = []
    it = iter(field_text)
    for ch in it:
        if ch != "\\":
            out.append(ch)
            continue
        try:
            nxt = next(it)
        except StopIteration:
            raise ParseError("dangling escape at end of field", line) from None
        if nxt == "\\":
            out.append("\\")
        elif nxt == "p":
            out.append("|")
        elif nxt == "n":
            out.append("\n")
        else:
            raise ParseError(f"unknown escape sequence \\{nxt}", line)
    return "".join(out)


def _split_pipe(line_text: str, line: int) -> list[str]:
    fields: list[str] = []
    buf: list[str] = []
    escaped = False
    for ch in line_text:
        if escaped:
            buf.append(ch)
            escaped = False
        elif ch == "\\":
            buf.append(ch)
            escaped = True
        elif ch == "|":
            fields.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
    if escaped:
        raise ParseError("dangling escape at end of line", line)
    fields.append("".join(buf))
    return [_unescape(f, line) for f in fields]


def _parse_int(text: str, what: str, line: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"{what} is not an integer: {text!r}", line) from None


def _parse_span(text: str, what: str, line: int) -> tuple[int, ...]:
    if not text.strip():
        raise ParseError(f"{what} span is empty", line)
    return tuple(_parse_int(part, what, line) for part in text.split(","))


def _relation_from_fields(fields: list[str], line: int) -> RelationRecord:
    if len(fields) != _PIPE_FIELDS:
        raise ParseError(f"expected {_PIPE_FIELDS} fields, got {len(fields)}", line)
    kind_name, section_s, file_s, senses_s, a1_span, a1_text, a2_span, a2_text = fields
    kind = _KIND_BY_NAME.get(kind_name)
    if kind is None:
        raise ParseError(f"unknown relation kind {kind_name!r}", line)
    section = _parse_int(section_s, "section", line)
    file_num = _parse_int(file_s, "file", line)
    if not MIN_SECTION <= section <= MAX_SECTION:
        raise ParseError(f"section {section} outside {MIN_SECTION}..{MAX_SECTION}", line)
    senses = tuple(s for s in senses_s.split(";") if s) if senses_s else ()
    try:
        return RelationRecord(
            kind=kind,
            senses=senses,
            section=section,
            file=file_num,
            arg1=Argument(_parse_span(a1_span, "arg1", line), a1_text),
            arg2=Argument(_parse_span(a2_span, "arg2", line), a2_text),
        )
    except CorpusInvariantError as exc:
        raise ParseError(str(exc), line) from None


def _relation_to_pipe(rel: RelationRecord) -> str:
    fields = [
        rel.kind.value,
        str(rel.section),
        str(rel.file),
        ";".join(rel.senses),
        ",".join(str(i) for i in rel.arg1.sentences),
        rel.arg1.text,
        ",".join(str(i) for i in rel.arg2.sentences),
        rel.arg2.text,
    ]
    return "|".join(_escape(f) for f in fields)


def _sentence_from_pipe(fields: list[str], line: int) -> SentenceRecord:
    if len(fields) != _SENTENCE_FIELDS:
        raise ParseError(
            f"expected {_SENTENCE_FIELDS} sentence fields, got {len(fields)}", line
        )
    section = _parse_int(fields[0], "section", line)
    file_num = _parse_int(fields[1], "file", line)
    index = _parse_int(fields[2], "sentence", line)
    if not MIN_SECTION <= section <= MAX_SECTION:
        raise ParseError(f"section {section} outside {MIN_SECTION}..{MAX_SECTION}", line)
    if index < 0:
        raise ParseError(f"negative sentence index {index}", line)
    return SentenceRecord(section=section, file=file_num, sentence=index, text=fields[3])


def _sentence_to_pipe(s: SentenceRecord) -> str:
    return "|".join(
        _escape(f) for f in (str(s.section), str(s.file), str(s.sentence), s.text)
    )


# --------------------------------------------------------------------------
# record-json format (JSONL mirror of the pipe fields)

_RELATION_KEYS = (
    "kind",
    "senses",
    "section",
    "file",
    "arg1_sentences",
    "arg2_sentences",
    "arg1_text",
    "arg2_text",
)


def _relation_from_json(obj: object, line: int) -> RelationRecord:
    if not isinstance(obj, dict):
        raise ParseError("relation record is not a JSON object", line)
    missing = [k for k in _RELATION_KEYS if k not in obj]
    if missing:
        raise ParseError(f"missing keys: {', '.join(missing)}", line)
    kind = _KIND_BY_NAME.get(obj["kind"])
    if kind is None:
        raise ParseError(f"unknown relation kind {obj['kind']!r}", line)
    senses = obj["senses"]
    if not isinstance(senses, list) or not all(isinstance(s, str) for s in senses):
        raise ParseError("senses must be a list of strings", line)
    for span_key in ("arg1_sentences", "arg2_sentences"):
        span = obj[span_key]
        if not isinstance(span, list) or not all(isinstance(i, int) for i in span):
            raise ParseError(f"{span_key} must be a list of integers", line)
    for key in ("section", "file"):
        if not isinstance(obj[key], int):
            raise ParseError(f"{key} must be an integer", line)
    if not MIN_SECTION <= obj["section"] <= MAX_SECTION:
        raise ParseError(
            f"section {obj['section']} outside {MIN_SECTION}..{MAX_SECTION}", line
        )
    try:
        return RelationRecord(
            kind=kind,
            senses=tuple(senses),
            section=obj["section"],
            file=obj["file"],
            arg1=Argument(tuple(obj["arg1_sentences"]), str(obj["arg1_text"])),
            arg2=Argument(tuple(obj["arg2_sentences"]), str(obj["arg2_text"])),
        )
    except CorpusInvariantError as exc:
        raise ParseError(str(exc), line) from None


def _relation_to_json(rel: RelationRecord) -> str:
    obj = {
        "kind": rel.kind.value,
        "senses": list(rel.senses),
        "section": rel.section,
        "file": rel.file,
        "arg1_sentences": list(rel.arg1.sentences),
        "arg2_sentences": list(rel.arg2.sentences),
        "arg1_text": rel.arg1.text,
        "arg2_text": rel.arg2.text,
    }
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def _sentence_from_json(obj: object, line: int) -> SentenceRecord:
    if not isinstance(obj, dict):
        raise ParseError("sentence record is not a JSON object", line)
    for key in ("section", "file", "sentence"):
        if not isinstance(obj.get(key), int):
            raise ParseError(f"{key} must be an integer", line)
    if "text" not in obj or not isinstance(obj["text"], str):
        raise ParseError("text must be a string", line)
    if not MIN_SECTION <= obj["section"] <= MAX_SECTION:
        raise ParseError(
            f"section {obj['section']} outside {MIN_SECTION}..{MAX_SECTION}", line
        )
    if obj["sentence"] < 0:
        raise ParseError(f"negative sentence index {obj['sentence']}", line)
    return SentenceRecord(
        section=obj["section"], file=obj["file"], sentence=obj["sentence"], text=obj["text"]
    )


def _sentence_to_json(s: SentenceRecord) -> str:
    obj = {"section": s.section, "file": s.file, "sentence": s.sentence, "text": s.text}
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


# --------------------------------------------------------------------------
# assembly

FORMATS = ("pipe", "record-json")


def _iter_lines(source: str | bytes | Path | IO) -> Iterator[tuple[int, str]]:
    if isinstance(source, Path):
        text = source.read_text(encoding="utf-8")
    elif isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    for i, line in enumerate(text.split("\n"), start=1):
        if line.strip():
            yield i, line


def _derive_sentences(
    relations: Iterable[RelationRecord],
) -> dict[tuple[int, int], dict[int, str]]:
    """Anchor each argument's text at the first index of its span.

    The longest text registered for an index wins, approximating the most
    complete discourse unit at that position.
    """
    derived: dict[tuple[int, int], dict[int, str]] = {}
    for rel in relations:
        doc = derived.setdefault((rel.section, rel.file), {})
        for arg in (rel.arg1, rel.arg2):
            anchor = arg.first
            if len(arg.text) > len(doc.get(anchor, "")):
                doc[anchor] = arg.text
    return derived


def _assemble(
    relations: list[tuple[int, RelationRecord]],
    sentences: list[tuple[int, SentenceRecord]] | None,
    report: ParseReport,
) -> Corpus:
    doc_sentences: dict[tuple[int, int], dict[int, SentenceRecord]] = {}
    declared = sentences is not None
    if declared:
        for line, s in sentences or []:
            doc = doc_sentences.setdefault((s.section, s.file), {})
            if s.sentence in doc:
                raise ParseError(
                    f"duplicate sentence ({s.section},{s.file},{s.sentence})", line
                )
            doc[s.sentence] = s
    else:
        for key, texts in _derive_sentences(r for _, r in relations).items():
            doc_sentences[key] = {
                i: SentenceRecord(key[0], key[1], i, text) for i, text in texts.items()
            }

    doc_relations: dict[tuple[int, int], list[RelationRecord]] = {}
    for line, rel in relations:
        key = (rel.section, rel.file)
        if declared:
            known = doc_sentences.get(key, {})
            for arg in (rel.arg1, rel.arg2):
                dangling = [i for i in arg.sentences if i not in known]
                if dangling:
                    raise ParseError(
                        f"dangling span reference {dangling} in document {key}", line
                    )
        doc_relations.setdefault(key, []).append(rel)
        if rel.has_class_conflict():
            report.double_class_relations += 1
        if rel.kind in SENSE_BEARING_KINDS:
            # non-first senses never label, so failures here are warnings
            for sense in rel.senses[1:]:
                try:
                    extract_class(sense)
                except UnknownClassError:
                    report.unparseable_senses.append((line, sense))

    documents = {}
    for key in sorted(set(doc_sentences) | set(doc_relations)):
        section, file_num = key
        by_index = doc_sentences.get(key, {})
        documents[key] = Document(
            section=section,
            file=file_num,
            sentences=tuple(by_index[i] for i in sorted(by_index)),
            relations=tuple(doc_relations.get(key, [])),
        )
    report.documents = len(documents)
    report.relations = sum(len(d.relations) for d in documents.values())
    report.sentences = sum(len(d.sentences) for d in documents.values())
    return Corpus(documents=documents)


def parse_corpus(
    source: str | bytes | Path | IO,
    format: str = "record-json",
    sentences: str | bytes | Path | IO | None = None,
    strict: bool = True,
) -> tuple[Corpus, ParseReport]:
    """Parse a relations stream (plus optional sentence sidecar) into a Corpus.

    With ``strict`` (the default) any malformed line raises
    :class:`ParseError`; otherwise malformed relation lines are skipped and
    recorded in the report.  Unparseable sense strings are always recorded,
    never silently dropped.
    """
    if format not in FORMATS:
        raise ParseError(f"unknown format {format!r}")
    report = ParseReport()

    relations: list[tuple[int, RelationRecord]] = []
    for line, text in _iter_lines(source):
        try:
            if format == "pipe":
                rel = _relation_from_fields(_split_pipe(text, line), line)
            else:
                try:
                    obj = json.loads(text)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"invalid JSON: {exc.msg}", line) from None
                rel = _relation_from_json(obj, line)
        except ParseError as exc:
            if strict:
                raise
            report.skipped_lines.append((line, str(exc)))
            continue
        if rel.kind in SENSE_BEARING_KINDS:
            # the first sense labels the relation, so it must resolve
            try:
                extract_class(rel.senses[0])
            except UnknownClassError:
                report.unparseable_senses.append((line, rel.senses[0]))
                if strict:
                    raise ParseError(
                        f"sense {rel.senses[0]!r} has no recognizable class head", line
                    ) from None
                report.skipped_lines.append((line, f"unlabelable {rel.kind.value} relation"))
                continue
        relations.append((line, rel))

    sentence_records: list[tuple[int, SentenceRecord]] | None = None
    if sentences is not None:
        sentence_records = []
        for line, text in _iter_lines(sentences):
            if format == "pipe":
                sentence_records.append((line, _sentence_from_pipe(_split_pipe(text, line), line)))
            else:
                try:
                    obj = json.loads(text)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"invalid JSON: {exc.msg}", line) from None
                sentence_records.append((line, _sentence_from_json(obj, line)))

    return _assemble(relations, sentence_records, report), report


def serialize_corpus(corpus: Corpus, format: str = "record-json") -> tuple[str, str]:
    """Render a corpus as (relations text, sentences sidecar text)."""
    if format not in FORMATS:
        raise ParseError(f"unknown format {format!r}")
    rel_lines = []
    sent_lines = []
    for doc in corpus.ordered_documents():
        for rel in doc.relations:
            rel_lines.append(
                _relation_to_pipe(rel) if format == "pipe" else _relation_to_json(rel)
            )
        for s in doc.sentences:
            sent_lines.append(
                _sentence_to_pipe(s) if format == "pipe" else _sentence_to_json(s)
            )
    rel_text = "\n".join(rel_lines) + ("\n" if rel_lines else "")
    sent_text = "\n".join(sent_lines) + ("\n" if sent_lines else "")
    return rel_text, sent_text


def sentences_path_for(relations_path: str | Path) -> Path:
    """Conventional sidecar path: corpus.pipe -> corpus.sentences.pipe."""
    p = Path(relations_path)
    if p.suffix:
        return p.with_suffix(f".sentences{p.suffix}")
    return p.with_name(p.name + ".sentences")


def write_corpus(
    corpus: Corpus,
    relations_path: str | Path,
    sentences_path: str | Path | None = None,
    format: str = "record-json",
) -> tuple[Path, Path]:
    relations_path = Path(relations_path)
    sentences_path = (
        Path(sentences_path) if sentences_path else sentences_path_for(relations_path)
    )
    rel_text, sent_text = serialize_corpus(corpus, format)
    relations_path.parent.mkdir(parents=True, exist_ok=True)
    relations_path.write_text(rel_text, encoding="utf-8")
    sentences_path.parent.mkdir(parents=True, exist_ok=True)
    sentences_path.write_text(sent_text, encoding="utf-8")
    return relations_path, sentences_path


def read_corpus(
    relations_path: str | Path,
    sentences_path: str | Path | None = None,
    format: str = "record-json",
    strict: bool = True,
) -> tuple[Corpus, ParseReport]:
    relations_path = Path(relations_path)
    if sentences_path is None:
        candidate = sentences_path_for(relations_path)
        sentences_path = candidate if candidate.exists() else None
    return parse_corpus(
        relations_path,
        format=format,
        sentences=Path(sentences_path) if sentences_path else None,
        strict=strict,
    )
