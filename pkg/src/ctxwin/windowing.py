"""Context-window dataset builders.

Four strategies turn a corpus's implicit relations into labeled examples:

* ``baseline``: the argument pair alone;
* ``dn`` (direct neighbors, n in {1, 2}): keep only pairs whose
  immediately adjacent sentences participate in an annotated relation
  (n=1: either side, n=2: both sides), attaching those neighbors;
* ``ewn`` (expanded window neighbors, n in {2, 4}): attach the n/2
  nearest annotated units before arg1 and after arg2, never filtering;
* ``psrn`` (position-respecting random neighbors): attach one unit
  sampled uniformly from those strictly before arg1 and one from those
  strictly after arg2, with a per-example seeded stream.

Context never crosses a document boundary, and the candidate pool is the
set of annotated discourse units: sentences anchoring an argument of an
implicit, explicit, or entity relation in the same document.
:func:`build_reference` is a deliberately naive re-implementation used
as a testing oracle.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

import numpy as np

from .corpus import ClassLabel, Corpus, Document, RelationKind, RelationRecord
from .errors import ConfigError

# Relation kinds whose arguments count as annotated context units.
POOL_KINDS = frozenset({RelationKind.IMPLICIT, RelationKind.EXPLICIT, RelationKind.ENTREL})

STRATEGY_KINDS = ("baseline", "dn", "ewn", "psrn")
DN_VALUES = (1, 2)
EWN_VALUES = (2, 4)


@dataclass(frozen=True)
class Strategy:
    """A window strategy plus its parameter (n for dn/ewn, seed for psrn)."""

    kind: str
    n: int | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in STRATEGY_KINDS:
            raise ConfigError(f"unknown strategy {self.kind!r}")
        if self.kind == "dn" and self.n not in DN_VALUES:
            raise ConfigError(f"dn requires n in {DN_VALUES}, got {self.n}")
        if self.kind == "ewn" and self.n not in EWN_VALUES:
            raise ConfigError(f"ewn requires n in {EWN_VALUES}, got {self.n}")
        if self.kind == "psrn" and (self.seed is None or self.seed < 0):
            raise ConfigError("psrn requires a non-negative seed")
        if self.kind in ("baseline", "psrn") and self.n is not None:
            raise ConfigError(f"{self.kind} takes no n")

    @property
    def name(self) -> str:
        if self.kind in ("dn", "ewn"):
            return f"{self.kind}{self.n}"
        return self.kind


@dataclass(frozen=True)
class Example:
    context_before: tuple[str, ...]
    arg1: str
    arg2: str
    context_after: tuple[str, ...]
    label: ClassLabel
    section: int
    file: int
    arg2_first: int


@dataclass(frozen=True)
class Dataset:
    strategy: str
    examples: tuple[Example, ...]

    def __len__(self) -> int:
        return len(self.examples)


def _participating_indices(doc: Document) -> frozenset[int]:
    """Sentence indices covered by any argument of a pool-kind relation."""
    hit: set[int] = set()
    for rel in doc.relations:
        if rel.kind in POOL_KINDS:
            hit.update(rel.arg1.sentences)
            hit.update(rel.arg2.sentences)
    return frozenset(hit)


def _unit_pool(doc: Document) -> list[tuple[int, str]]:
    """Annotated context units: anchor indices of pool-kind arguments, with text."""
    anchors: set[int] = set()
    for rel in doc.relations:
        if rel.kind in POOL_KINDS:
            anchors.add(rel.arg1.first)
            anchors.add(rel.arg2.first)
    pool = []
    for index in sorted(anchors):
        text = doc.text_at(index)
        if text is not None:
            pool.append((index, text))
    return pool


def _example(
    rel: RelationRecord, before: tuple[str, ...], after: tuple[str, ...]
) -> Example:
    return Example(
        context_before=before,
        arg1=rel.arg1.text,
        arg2=rel.arg2.text,
        context_after=after,
        label=rel.class_label(),
        section=rel.section,
        file=rel.file,
        arg2_first=rel.arg2.first,
    )


def _psrn_rng(seed: int, section: int, file: int, ordinal: int) -> np.random.Generator:
    # Keyed per example so corpus-level reordering cannot reshuffle draws.
    return np.random.default_rng(np.random.SeedSequence((seed, section, file, ordinal)))


def build_baseline(corpus: Corpus) -> Dataset:
    examples = [
        _example(rel, (), ())
        for doc in corpus.ordered_documents()
        for rel in doc.relations
        if rel.kind is RelationKind.IMPLICIT
    ]
    return Dataset(strategy="baseline", examples=tuple(examples))


def build_dn(corpus: Corpus, n: int) -> Dataset:
    strategy = Strategy("dn", n=n)
    examples = []
    for doc in corpus.ordered_documents():
        participating = _participating_indices(doc)
        for rel in doc.relations:
            if rel.kind is not RelationKind.IMPLICIT:
                continue
            before_idx = rel.arg1.first - 1
            after_idx = rel.arg2.last + 1
            before_ok = before_idx in participating
            after_ok = after_idx in participating
            keep = (before_ok and after_ok) if n == 2 else (before_ok or after_ok)
            if not keep:
                continue
            before_text = doc.text_at(before_idx) if before_ok else None
            after_text = doc.text_at(after_idx) if after_ok else None
            examples.append(
                _example(
                    rel,
                    (before_text,) if before_text is not None else (),
                    (after_text,) if after_text is not None else (),
                )
            )
    return Dataset(strategy=strategy.name, examples=tuple(examples))


def build_ewn(corpus: Corpus, n: int) -> Dataset:
    strategy = Strategy("ewn", n=n)
    per_side = n // 2
    examples = []
    for doc in corpus.ordered_documents():
        pool = _unit_pool(doc)
        positions = [index for index, _ in pool]
        for rel in doc.relations:
            if rel.kind is not RelationKind.IMPLICIT:
                continue
            split_before = bisect.bisect_left(positions, rel.arg1.first)
            split_after = bisect.bisect_right(positions, rel.arg2.last)
            before = tuple(text for _, text in pool[max(0, split_before - per_side):split_before])
            after = tuple(text for _, text in pool[split_after:split_after + per_side])
            examples.append(_example(rel, before, after))
    return Dataset(strategy=strategy.name, examples=tuple(examples))


def build_psrn(corpus: Corpus, seed: int) -> Dataset:
    strategy = Strategy("psrn", seed=seed)
    examples = []
    for doc in corpus.ordered_documents():
        pool = _unit_pool(doc)
        positions = [index for index, _ in pool]
        for ordinal, rel in enumerate(doc.relations):
            if rel.kind is not RelationKind.IMPLICIT:
                continue
            split_before = bisect.bisect_left(positions, rel.arg1.first)
            split_after = bisect.bisect_right(positions, rel.arg2.last)
            candidates_before = pool[:split_before]
            candidates_after = pool[split_after:]
            rng = _psrn_rng(seed, doc.section, doc.file, ordinal)
            before: tuple[str, ...] = ()
            after: tuple[str, ...] = ()
            if candidates_before:
                before = (candidates_before[int(rng.integers(len(candidates_before)))][1],)
            if candidates_after:
                after = (candidates_after[int(rng.integers(len(candidates_after)))][1],)
            examples.append(_example(rel, before, after))
    return Dataset(strategy=strategy.name, examples=tuple(examples))


def build(corpus: Corpus, strategy: Strategy) -> Dataset:
    if strategy.kind == "baseline":
        return build_baseline(corpus)
    if strategy.kind == "dn":
        return build_dn(corpus, strategy.n)  # type: ignore[arg-type]
    if strategy.kind == "ewn":
        return build_ewn(corpus, strategy.n)  # type: ignore[arg-type]
    return build_psrn(corpus, strategy.seed)  # type: ignore[arg-type]


# --------------------------------------------------------------------------
# brute-force reference builder (testing oracle)


def _reference_participates(doc: Document, index: int) -> bool:
    for rel in doc.relations:
        if rel.kind not in POOL_KINDS:
            continue
        if index in rel.arg1.sentences or index in rel.arg2.sentences:
            return True
    return False


def _reference_is_anchor(doc: Document, index: int) -> bool:
    for rel in doc.relations:
        if rel.kind not in POOL_KINDS:
            continue
        if rel.arg1.first == index or rel.arg2.first == index:
            return True
    return False


def _reference_units(doc: Document) -> list[tuple[int, str]]:
    units = []
    for sentence in doc.sentences:
        if _reference_is_anchor(doc, sentence.sentence):
            units.append((sentence.sentence, sentence.text))
    return units


def build_reference(corpus: Corpus, strategy: Strategy) -> Dataset:
    """Exhaustive re-implementation of :func:`build`; scans every sentence."""
    examples = []
    for doc in corpus.ordered_documents():
        for ordinal, rel in enumerate(doc.relations):
            if rel.kind is not RelationKind.IMPLICIT:
                continue
            if strategy.kind == "baseline":
                examples.append(_example(rel, (), ()))
                continue
            if strategy.kind == "dn":
                before_ok = _reference_participates(doc, rel.arg1.first - 1)
                after_ok = _reference_participates(doc, rel.arg2.last + 1)
                keep = (before_ok and after_ok) if strategy.n == 2 else (before_ok or after_ok)
                if not keep:
                    continue
                before = ()
                after = ()
                if before_ok:
                    text = doc.text_at(rel.arg1.first - 1)
                    before = (text,) if text is not None else ()
                if after_ok:
                    text = doc.text_at(rel.arg2.last + 1)
                    after = (text,) if text is not None else ()
                examples.append(_example(rel, before, after))
                continue

            units = _reference_units(doc)
            units_before = [u for u in units if u[0] < rel.arg1.first]
            units_after = [u for u in units if u[0] > rel.arg2.last]
            if strategy.kind == "ewn":
                per_side = strategy.n // 2  # type: ignore[operator]
                before = tuple(text for _, text in units_before[-per_side:]) if units_before else ()
                after = tuple(text for _, text in units_after[:per_side])
                examples.append(_example(rel, before, after))
            else:  # psrn
                rng = _psrn_rng(strategy.seed, doc.section, doc.file, ordinal)  # type: ignore[arg-type]
                before = ()
                after = ()
                if units_before:
                    before = (units_before[int(rng.integers(len(units_before)))][1],)
                if units_after:
                    after = (units_after[int(rng.integers(len(units_after)))][1],)
                examples.append(_example(rel, before, after))
    return Dataset(strategy=strategy.name, examples=tuple(examples))
