from __future__ import annotations

import numpy as np
import pytest

from ctxwin import (
    EncodingSpec,
    FeatureVector,
    ModelBundle,
    ModelParams,
    TrainConfig,
    Vocabulary,
    build_baseline,
    encode_dataset,
    featurize,
    gradient,
    loss,
    predict,
    predict_proba,
    train,
)
from ctxwin.errors import ConfigError, CtxwinError, TrainingDivergedError


def random_instance(seed, dim=6, n=5):
    rng = np.random.default_rng(seed)
    batch = []
    for _ in range(n):
        size = int(rng.integers(1, dim + 1))
        idx = tuple(sorted(rng.choice(dim, size=size, replace=False).tolist()))
        batch.append(
            FeatureVector(idx, tuple(float(v) for v in rng.integers(1, 4, size)), dim)
        )
    labels = [int(v) for v in rng.integers(0, 4, n)]
    config = TrainConfig(l2=float(rng.choice([0.0, 1e-4, 1e-2])))
    params = ModelParams(
        weights=rng.normal(0.0, 0.5, (4, dim)), bias=rng.normal(0.0, 0.5, 4), config=config
    )
    return params, batch, labels


def finite_difference(params, batch, labels, step=1e-5):
    """Central-difference gradient of the loss, the slow way."""
    grads = []
    for arr in (params.weights, params.bias):
        grad = np.zeros_like(arr)
        it = np.nditer(arr, flags=["multi_index"])
        for _ in it:
            index = it.multi_index
            original = arr[index]
            arr[index] = original + step
            upper = loss(params, batch, labels)
            arr[index] = original - step
            lower = loss(params, batch, labels)
            arr[index] = original
            grad[index] = (upper - lower) / (2 * step)
        grads.append(grad)
    return grads


def max_relative_error(analytic, numeric):
    worst = 0.0
    for a, f in zip(analytic, numeric):
        worst = max(worst, float(np.max(np.abs(a - f) / (1.0 + np.abs(f)))))
    return worst


SEPARABLE_POINTS = []
SEPARABLE_LABELS = []
_rng = np.random.default_rng(5)
for _ in range(10):
    hot = 1.0 + _rng.random()
    cold = _rng.random() * 0.3
    SEPARABLE_POINTS.append(FeatureVector((0, 1), (float(hot), float(cold)), 2))
    SEPARABLE_LABELS.append(0)
    SEPARABLE_POINTS.append(FeatureVector((0, 1), (float(cold), float(hot)), 2))
    SEPARABLE_LABELS.append(1)


class TestFeatureVector:
    def test_validation(self):
        with pytest.raises(ConfigError):
            FeatureVector((2, 1), (1.0, 1.0), 5)
        with pytest.raises(ConfigError):
            FeatureVector((0, 0), (1.0, 1.0), 5)
        with pytest.raises(ConfigError):
            FeatureVector((0, 9), (1.0, 1.0), 5)
        with pytest.raises(ConfigError):
            FeatureVector((0,), (float("inf"),), 5)

    def test_dense(self):
        fv = FeatureVector((1, 3), (2.0, 4.0), 5)
        assert fv.dense().tolist() == [0.0, 2.0, 0.0, 4.0, 0.0]


class TestVocabularyAndFeatures:
    def test_fit_is_sorted_and_deterministic(self, small_corpus):
        encoded = encode_dataset(build_baseline(small_corpus), EncodingSpec(max_length=32))
        vocab_a = Vocabulary.fit(encoded)
        vocab_b = Vocabulary.fit(encoded)
        assert vocab_a.tokens == vocab_b.tokens
        assert list(vocab_a.tokens) == sorted(vocab_a.tokens)

    def test_counts_weighting(self):
        vocab = Vocabulary(["a", "b", "c"], {"a": 1, "b": 1, "c": 1}, documents=2)
        from ctxwin.dataset import EncodedExample

        encoded = EncodedExample(tokens=("a", "b", "a", "[PAD]"), mask=(1, 1, 1, 0), label_index=0)
        fv = featurize(encoded, vocab)
        assert fv.indices == (0, 1)
        assert fv.weights == (2.0, 1.0)

    def test_unknown_tokens_dropped_and_padding_ignored(self):
        vocab = Vocabulary(["known"], {"known": 1}, documents=1)
        from ctxwin.dataset import EncodedExample

        encoded = EncodedExample(
            tokens=("known", "novel", "[PAD]"), mask=(1, 1, 0), label_index=1
        )
        fv = featurize(encoded, vocab)
        assert fv.indices == (0,)

    def test_tfidf_scales_by_rarity(self):
        vocab = Vocabulary(["common", "rare"], {"common": 9, "rare": 1}, documents=9)
        from ctxwin.dataset import EncodedExample

        encoded = EncodedExample(tokens=("common", "rare"), mask=(1, 1), label_index=0)
        fv = featurize(encoded, vocab, weighting="tfidf")
        weights = dict(zip(fv.indices, fv.weights))
        assert weights[1] > weights[0] > 0.0


class TestPredictProba:
    def test_uniform_at_zero(self):
        params = ModelParams.zeros(3)
        probs = predict_proba(params, FeatureVector((0,), (1.0,), 3))
        assert probs.tolist() == [0.25, 0.25, 0.25, 0.25]

    def test_bias_dominance(self):
        params = ModelParams.zeros(2)
        params.bias = np.array([10.0, 0.0, 0.0, 0.0])
        probs = predict_proba(params, FeatureVector((), (), 2))
        assert int(np.argmax(probs)) == 0

    def test_matches_naive_exp_normalize(self):
        # direct exp/sum oracle without the max-shift trick
        rng = np.random.default_rng(3)
        for _ in range(50):
            dim = 5
            params = ModelParams(
                weights=rng.normal(0, 1, (4, dim)), bias=rng.normal(0, 1, 4),
                config=TrainConfig(),
            )
            x = rng.normal(0, 1, dim)
            idx = tuple(range(dim))
            fv = FeatureVector(idx, tuple(float(v) for v in x), dim)
            logits = params.weights @ x + params.bias
            naive = np.exp(logits) / np.exp(logits).sum()
            ours = predict_proba(params, fv)
            assert float(np.max(np.abs(ours - naive))) < 1e-12
            assert abs(float(ours.sum()) - 1.0) < 1e-12
            assert np.all(ours >= 0)

    def test_shift_invariance(self):
        rng = np.random.default_rng(4)
        params = ModelParams(
            weights=rng.normal(0, 1, (4, 3)), bias=rng.normal(0, 1, 4), config=TrainConfig()
        )
        shifted = ModelParams(
            weights=params.weights.copy(), bias=params.bias + 123.456, config=TrainConfig()
        )
        fv = FeatureVector((0, 2), (1.0, 2.0), 3)
        assert float(np.max(np.abs(predict_proba(params, fv) - predict_proba(shifted, fv)))) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(CtxwinError, match="dim"):
            predict_proba(ModelParams.zeros(3), FeatureVector((0,), (1.0,), 7))


class TestGradient:
    def test_closed_form_at_zero_params(self):
        # uniform predictions, one-hot target: bias gradient is p - y
        params = ModelParams.zeros(4, TrainConfig(l2=0.0))
        batch = [FeatureVector((1,), (1.0,), 4)]
        _, grad_b = gradient(params, batch, [2])
        expected = np.array([0.25, 0.25, -0.75, 0.25])
        assert np.allclose(grad_b, expected, atol=1e-15)

    def test_l2_vanishes_at_zero_weights(self):
        batch = [FeatureVector((0, 1), (1.0, 2.0), 3)]
        plain = gradient(ModelParams.zeros(3, TrainConfig(l2=0.0)), batch, [1])
        regularized = gradient(ModelParams.zeros(3, TrainConfig(l2=0.5)), batch, [1])
        assert np.array_equal(plain[0], regularized[0])
        assert np.array_equal(plain[1], regularized[1])

    def test_matches_finite_differences(self):
        worst = 0.0
        for seed in range(30):
            params, batch, labels = random_instance(seed)
            analytic = gradient(params, batch, labels)
            numeric = finite_difference(params, batch, labels)
            worst = max(worst, max_relative_error(analytic, numeric))
        assert worst < 1e-5


class TestTrain:
    def test_zero_epochs_leaves_zero_init(self):
        result = train(SEPARABLE_POINTS, SEPARABLE_LABELS, TrainConfig(epochs=0))
        assert np.array_equal(result.params.weights, np.zeros((4, 2)))
        assert np.array_equal(result.params.bias, np.zeros(4))
        assert result.history == ()

    def test_separable_toy_set_reaches_full_accuracy(self):
        config = TrainConfig(epochs=200, learning_rate=0.5, l2=0.0)
        result = train(SEPARABLE_POINTS, SEPARABLE_LABELS, config)
        preds = predict(result.params, SEPARABLE_POINTS)
        assert float((preds == np.array(SEPARABLE_LABELS)).mean()) == 1.0
        assert any(h.train_accuracy == 1.0 for h in result.history)

    def test_single_example_overfits(self):
        fv = FeatureVector((0, 2, 3), (1.0, 2.0, 1.0), 5)
        result = train([fv], [2], TrainConfig(epochs=50))
        assert float(predict_proba(result.params, fv)[2]) > 0.9

    def test_loss_non_increasing_for_small_learning_rate(self):
        config = TrainConfig(epochs=60, learning_rate=0.05, l2=1e-4)
        result = train(SEPARABLE_POINTS, SEPARABLE_LABELS, config)
        losses = [h.loss for h in result.history]
        assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))

    def test_bit_identical_reruns(self, tmp_path):
        config = TrainConfig(epochs=25, learning_rate=0.5, l2=1e-4, seed=42)
        first = train(SEPARABLE_POINTS, SEPARABLE_LABELS, config)
        second = train(SEPARABLE_POINTS, SEPARABLE_LABELS, config)
        assert np.array_equal(first.params.weights, second.params.weights)
        assert np.array_equal(first.params.bias, second.params.bias)
        vocab = Vocabulary(["x0", "x1"], {"x0": 1, "x1": 1}, documents=2)
        paths = []
        for i, result in enumerate((first, second)):
            bundle = ModelBundle(result.params, vocab, EncodingSpec(), strategy="baseline")
            paths.append(bundle.save(tmp_path / f"model{i}.json"))
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_empty_train_set_rejected(self):
        with pytest.raises(CtxwinError, match="empty"):
            train([], [], TrainConfig())

    def test_divergence_aborts_with_diagnostics(self):
        batch = [FeatureVector((0,), (1e150,), 1), FeatureVector((0,), (-1e150,), 1)]
        with pytest.raises(TrainingDivergedError) as excinfo:
            train(batch, [0, 1], TrainConfig(epochs=5, learning_rate=1e5, l2=0.0))
        assert excinfo.value.epoch >= 1

    def test_per_epoch_callback_sees_every_epoch(self):
        seen = []
        train(
            SEPARABLE_POINTS,
            SEPARABLE_LABELS,
            TrainConfig(epochs=7),
            on_epoch=lambda stats, params: seen.append(stats.epoch),
        )
        assert seen == list(range(1, 8))


class TestBundle:
    def test_save_load_round_trip(self, tmp_path, small_corpus):
        encoding = EncodingSpec(max_length=48)
        dataset = build_baseline(small_corpus)
        encoded = encode_dataset(dataset, encoding)
        vocab = Vocabulary.fit(encoded)
        features = [featurize(e, vocab) for e in encoded]
        labels = [e.label_index for e in encoded]
        result = train(features, labels, TrainConfig(epochs=5))
        bundle = ModelBundle(result.params, vocab, encoding, strategy="baseline")
        path = bundle.save(tmp_path / "model.json")
        loaded = ModelBundle.load(path)
        assert np.array_equal(loaded.params.weights, result.params.weights)
        assert np.array_equal(loaded.params.bias, result.params.bias)
        assert loaded.vocab.tokens == vocab.tokens
        assert loaded.encoding == encoding
        assert loaded.strategy == "baseline"
        refeatured = [featurize(e, loaded.vocab) for e in encoded]
        assert np.array_equal(predict(loaded.params, refeatured), predict(result.params, features))

    def test_bad_format_rejected(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text('{"format": "something-else"}')
        with pytest.raises(CtxwinError, match="unsupported model format"):
            ModelBundle.load(path)
