"""Synthetic PDTB-shaped corpora for license-free testing.

The generator is a pure function of its configuration: a fixed seed
reproduces the corpus byte for byte.  Shapes (sections, sentence counts,
relation kind and class mixes) default to rough full-corpus proportions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .corpus import (
    MAX_SECTION,
    MIN_SECTION,
    Argument,
    ClassLabel,
    Corpus,
    Document,
    RelationKind,
    RelationRecord,
    SentenceRecord,
)
from .errors import ConfigError, InfeasibleConfigError

_WORDS = (
    "the a an of to in for on with by from at as but and or market share price "
    "company board analyst investor quarter report plan rate bond stock index "
    "growth decline profit loss sale deal offer unit group bank trade fund "
    "government policy official measure rule year month week time result "
    "new old big small strong weak early late high low likely recent "
    "said says rose fell gained dropped announced approved rejected expects"
).split()

_SENSES: Mapping[ClassLabel, tuple[str, ...]] = {
    ClassLabel.TEMPORAL: (
        "Temporal.Asynchronous.Precedence",
        "Temporal.Asynchronous.Succession",
        "Temporal.Synchrony",
    ),
    ClassLabel.CONTINGENCY: (
        "Contingency.Cause.Reason",
        "Contingency.Cause.Result",
        "Contingency.Pragmatic cause.Justification",
    ),
    ClassLabel.COMPARISON: (
        "Comparison.Contrast",
        "Comparison.Contrast.Juxtaposition",
        "Comparison.Concession.Contra-expectation",
    ),
    ClassLabel.EXPANSION: (
        "Expansion.Conjunction",
        "Expansion.Restatement.Specification",
        "Expansion.Instantiation",
    ),
}

_DEFAULT_KIND_MIX: Mapping[str, float] = {
    "Explicit": 0.45,
    "Implicit": 0.40,
    "EntRel": 0.12,
    "AltLex": 0.02,
    "NoRel": 0.01,
}

_DEFAULT_CLASS_MIX: Mapping[str, float] = {
    "Expansion": 0.54,
    "Contingency": 0.26,
    "Comparison": 0.14,
    "Temporal": 0.06,
}


@dataclass(frozen=True)
class SyntheticConfig:
    """Knobs for :func:`generate_synthetic`.

    ``relations_per_doc`` switches to exact-count placement (errors when a
    document cannot host that many distinct sentence pairs); otherwise each
    adjacent sentence pair is annotated with probability
    ``annotation_density`` and extra non-adjacent pairs appear at
    ``nonadjacent_rate``.  ``label_signal`` injects a class-marker token
    into implicit arg2 sentences with the given probability, giving
    classifiers something learnable.
    """

    documents: int = 20
    sentences_per_doc: tuple[int, int] = (4, 12)
    kind_mix: Mapping[str, float] = field(default_factory=lambda: dict(_DEFAULT_KIND_MIX))
    class_mix: Mapping[str, float] = field(default_factory=lambda: dict(_DEFAULT_CLASS_MIX))
    annotation_density: float = 0.6
    nonadjacent_rate: float = 0.08
    relations_per_doc: int | None = None
    double_sense_rate: float = 0.04
    label_signal: float = 0.0
    section_weights: Mapping[int, float] | None = None
    seed: int = 42


def _normalized(mix: Mapping[str, float], allowed: set[str], what: str) -> dict[str, float]:
    unknown = set(mix) - allowed
    if unknown:
        raise ConfigError(f"unknown {what} entries: {sorted(unknown)}")
    if any(v < 0 for v in mix.values()):
        raise ConfigError(f"{what} has negative weights")
    total = float(sum(mix.values()))
    if abs(total - 1.0) > 1e-6:
        raise ConfigError(f"{what} must sum to 1, got {total}")
    return {k: float(v) / total for k, v in mix.items() if v > 0}


def _validate(config: SyntheticConfig) -> tuple[dict[str, float], dict[str, float], dict[int, float]]:
    if config.documents < 0:
        raise ConfigError("documents must be non-negative")
    lo, hi = config.sentences_per_doc
    if lo < 1 or hi < lo:
        raise ConfigError(f"invalid sentences_per_doc range ({lo}, {hi})")
    for name in ("annotation_density", "nonadjacent_rate", "double_sense_rate", "label_signal"):
        value = getattr(config, name)
        if not 0.0 <= value <= 1.0:
            raise ConfigError(f"{name} must be in [0, 1], got {value}")
    if config.relations_per_doc is not None and config.relations_per_doc < 0:
        raise ConfigError("relations_per_doc must be non-negative")
    if config.seed < 0:
        raise ConfigError("seed must be non-negative")
    kind_mix = _normalized(config.kind_mix, {k.value for k in RelationKind}, "kind_mix")
    class_mix = _normalized(config.class_mix, {c.value for c in ClassLabel}, "class_mix")
    if config.section_weights is None:
        sections = {s: 1.0 / (MAX_SECTION + 1) for s in range(MIN_SECTION, MAX_SECTION + 1)}
    else:
        bad = [s for s in config.section_weights if not MIN_SECTION <= s <= MAX_SECTION]
        if bad:
            raise ConfigError(f"section_weights outside {MIN_SECTION}..{MAX_SECTION}: {bad}")
        if any(v < 0 for v in config.section_weights.values()):
            raise ConfigError("section_weights has negative weights")
        total = float(sum(config.section_weights.values()))
        if total <= 0:
            raise ConfigError("section_weights must have positive mass")
        sections = {int(k): float(v) / total for k, v in config.section_weights.items() if v > 0}
    return kind_mix, class_mix, sections


def _choice(rng: np.random.Generator, options: list, probs: list[float]):
    return options[int(rng.choice(len(options), p=np.asarray(probs) / np.sum(probs)))]


def _sentence_words(rng: np.random.Generator) -> list[str]:
    length = int(rng.integers(4, 13))
    return [_WORDS[int(i)] for i in rng.integers(0, len(_WORDS), size=length)]


def _pick_pairs(
    rng: np.random.Generator, n_sentences: int, config: SyntheticConfig
) -> list[tuple[int, int]]:
    all_pairs = [(i, j) for i in range(n_sentences) for j in range(i + 1, n_sentences)]
    if config.relations_per_doc is not None:
        want = config.relations_per_doc
        if want > len(all_pairs):
            raise InfeasibleConfigError(
                f"requested {want} relations but a {n_sentences}-sentence document "
                f"has only {len(all_pairs)} sentence pairs"
            )
        chosen = rng.choice(len(all_pairs), size=want, replace=False)
        return sorted(all_pairs[int(k)] for k in chosen)
    pairs = [
        (i, i + 1) for i in range(n_sentences - 1) if rng.random() < config.annotation_density
    ]
    # non-adjacent pairs appear with probability decaying in the gap
    for i, j in all_pairs:
        if j - i >= 2 and rng.random() < config.nonadjacent_rate / (j - i):
            pairs.append((i, j))
    return sorted(set(pairs))


def generate_synthetic(config: SyntheticConfig = SyntheticConfig()) -> Corpus:
    """Generate a corpus satisfying all Corpus invariants, deterministically."""
    kind_mix, class_mix, section_weights = _validate(config)
    rng = np.random.default_rng(np.random.SeedSequence(config.seed))

    kind_names = sorted(kind_mix)
    kind_probs = [kind_mix[k] for k in kind_names]
    class_names = sorted(class_mix)
    class_probs = [class_mix[c] for c in class_names]
    section_ids = sorted(section_weights)
    section_probs = [section_weights[s] for s in section_ids]

    files_per_section: dict[int, int] = {}
    documents: dict[tuple[int, int], Document] = {}
    lo, hi = config.sentences_per_doc

    for _ in range(config.documents):
        section = _choice(rng, section_ids, section_probs)
        file_num = files_per_section.get(section, 0)
        files_per_section[section] = file_num + 1

        n_sentences = int(rng.integers(lo, hi + 1))
        words = [_sentence_words(rng) for _ in range(n_sentences)]

        placements = []
        for i, j in _pick_pairs(rng, n_sentences, config):
            kind = RelationKind(_choice(rng, kind_names, kind_probs))
            senses: tuple[str, ...] = ()
            if kind in (RelationKind.IMPLICIT, RelationKind.EXPLICIT):
                label = ClassLabel(_choice(rng, class_names, class_probs))
                sense_pool = _SENSES[label]
                senses = (sense_pool[int(rng.integers(len(sense_pool)))],)
                if rng.random() < config.double_sense_rate:
                    second_label = ClassLabel(_choice(rng, class_names, class_probs))
                    pool = _SENSES[second_label]
                    senses = senses + (pool[int(rng.integers(len(pool)))],)
                if (
                    kind is RelationKind.IMPLICIT
                    and config.label_signal > 0
                    and rng.random() < config.label_signal
                ):
                    marker = f"about{label.value.lower()}"
                    words[j] = words[j] + [marker]
            placements.append((i, j, kind, senses))

        texts = [" ".join(w) + " ." for w in words]
        sentences = tuple(
            SentenceRecord(section=section, file=file_num, sentence=i, text=texts[i])
            for i in range(n_sentences)
        )
        relations = tuple(
            RelationRecord(
                kind=kind,
                senses=senses,
                section=section,
                file=file_num,
                arg1=Argument((i,), texts[i]),
                arg2=Argument((j,), texts[j]),
            )
            for i, j, kind, senses in placements
        )
        documents[(section, file_num)] = Document(
            section=section, file=file_num, sentences=sentences, relations=relations
        )

    return Corpus(documents={key: documents[key] for key in sorted(documents)})
