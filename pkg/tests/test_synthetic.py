from __future__ import annotations

import math

import pytest

from ctxwin import RelationKind, SyntheticConfig, generate_synthetic, serialize_corpus
from ctxwin.errors import ConfigError, InfeasibleConfigError


def test_fixed_seed_is_byte_identical():
    config = SyntheticConfig(documents=15, seed=7)
    first = serialize_corpus(generate_synthetic(config))
    second = serialize_corpus(generate_synthetic(config))
    assert first == second


def test_different_seeds_differ():
    a = serialize_corpus(generate_synthetic(SyntheticConfig(documents=15, seed=7)))
    b = serialize_corpus(generate_synthetic(SyntheticConfig(documents=15, seed=8)))
    assert a != b


def test_zero_relations_leaves_sentences_only():
    config = SyntheticConfig(documents=5, annotation_density=0.0, nonadjacent_rate=0.0, seed=1)
    corpus = generate_synthetic(config)
    assert corpus.relation_count() == 0
    assert corpus.sentence_count() > 0


def test_exact_relation_count_mode():
    config = SyntheticConfig(
        documents=10, sentences_per_doc=(6, 6), relations_per_doc=4, seed=3
    )
    corpus = generate_synthetic(config)
    for doc in corpus.ordered_documents():
        assert len(doc.relations) == 4


def test_infeasible_relation_count_rejected():
    config = SyntheticConfig(
        documents=1, sentences_per_doc=(3, 3), relations_per_doc=10, seed=3
    )
    with pytest.raises(InfeasibleConfigError, match="only 3 sentence pairs"):
        generate_synthetic(config)


def test_kind_frequencies_within_three_sigma():
    # multinomial counting oracle over the configured mix
    mix = {"Explicit": 0.4, "Implicit": 0.4, "EntRel": 0.15, "AltLex": 0.03, "NoRel": 0.02}
    corpus = generate_synthetic(
        SyntheticConfig(documents=100, sentences_per_doc=(8, 14), kind_mix=mix, seed=99)
    )
    total = corpus.relation_count()
    assert total > 300
    for kind in RelationKind:
        p = mix[kind.value]
        observed = corpus.relation_count(kind)
        expected = total * p
        sigma = math.sqrt(total * p * (1 - p))
        assert abs(observed - expected) <= 3 * sigma, (kind, observed, expected, sigma)


def test_class_mix_within_three_sigma():
    corpus = generate_synthetic(
        SyntheticConfig(documents=120, sentences_per_doc=(8, 14), seed=17)
    )
    labeled = [rel.class_label() for rel in corpus.implicit_relations()]
    total = len(labeled)
    assert total > 200
    for name, p in SyntheticConfig().class_mix.items():
        observed = sum(1 for label in labeled if label.value == name)
        sigma = math.sqrt(total * p * (1 - p))
        assert abs(observed - total * p) <= 3 * sigma, (name, observed, total * p)


def test_placement_covers_adjacent_and_nonadjacent_pairs():
    corpus = generate_synthetic(
        SyntheticConfig(documents=40, sentences_per_doc=(6, 12), nonadjacent_rate=0.4, seed=23)
    )
    gaps = [rel.arg2.first - rel.arg1.last for rel in corpus.relations()]
    assert any(gap == 1 for gap in gaps)
    assert any(gap >= 2 for gap in gaps)


def test_section_weights_respected():
    corpus = generate_synthetic(
        SyntheticConfig(documents=30, section_weights={3: 0.5, 9: 0.5}, seed=2)
    )
    sections = {doc.section for doc in corpus.ordered_documents()}
    assert sections <= {3, 9}


def test_document_keys_unique_and_consistent():
    corpus = generate_synthetic(SyntheticConfig(documents=50, seed=4))
    assert len(corpus.documents) == 50
    for (section, file_num), doc in corpus.documents.items():
        assert (doc.section, doc.file) == (section, file_num)
        indices = [s.sentence for s in doc.sentences]
        assert indices == list(range(len(indices)))


def test_label_signal_marks_arg2_sentences():
    corpus = generate_synthetic(
        SyntheticConfig(documents=30, label_signal=1.0, seed=11)
    )
    for rel in corpus.implicit_relations():
        marker = f"about{rel.class_label().value.lower()}"
        assert marker in rel.arg2.text


@pytest.mark.parametrize(
    "bad",
    [
        {"kind_mix": {"Implicit": 0.7, "Explicit": 0.7}},
        {"kind_mix": {"Implicit": 1.0, "Mystery": 0.0}},
        {"class_mix": {"Expansion": 1.5, "Temporal": -0.5}},
        {"sentences_per_doc": (0, 4)},
        {"sentences_per_doc": (5, 4)},
        {"annotation_density": 1.5},
        {"documents": -1},
        {"section_weights": {30: 1.0}},
        {"seed": -3},
    ],
)
def test_invalid_configs_rejected(bad):
    with pytest.raises(ConfigError):
        generate_synthetic(SyntheticConfig(**bad))
