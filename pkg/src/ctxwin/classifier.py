"""Bag-of-features multinomial logistic regression.

A deliberately small, fully deterministic stand-in for a neural encoder:
token counts (or tf-idf) feed a 4-way softmax layer trained by full-batch
gradient descent from zero initialization, so identical configurations
reproduce identical parameters bit for bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .corpus import CLASS_LABELS
from .dataset import EncodedExample, EncodingSpec
from .errors import ConfigError, CtxwinError, TrainingDivergedError
from .metrics import N_CLASSES

MODEL_FORMAT = "ctxwin-model-v1"
WEIGHTINGS = ("counts", "tfidf")


@dataclass(frozen=True)
class FeatureVector:
    """Sparse feature vector with strictly increasing indices."""

    indices: tuple[int, ...]
    weights: tuple[float, ...]
    dim: int

    def __post_init__(self):
        if len(self.indices) != len(self.weights):
            raise ConfigError("indices and weights lengths differ")
        if any(i < 0 or i >= self.dim for i in self.indices):
            raise ConfigError("feature index out of range")
        if list(self.indices) != sorted(set(self.indices)):
            raise ConfigError("feature indices must be strictly increasing")
        if any(not math.isfinite(w) for w in self.weights):
            raise ConfigError("feature weights must be finite")

    def dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        if self.indices:
            out[list(self.indices)] = self.weights
        return out


class Vocabulary:
    """Token-to-index map fit on training data; unseen tokens are dropped."""

    def __init__(self, tokens: Sequence[str], document_frequency: dict[str, int] | None = None,
                 documents: int = 0):
        self.tokens = tuple(tokens)
        self.index = {t: i for i, t in enumerate(self.tokens)}
        self.document_frequency = dict(document_frequency or {})
        self.documents = documents

    @classmethod
    def fit(cls, encoded: Sequence[EncodedExample]) -> "Vocabulary":
        seen: set[str] = set()
        df: dict[str, int] = {}
        for ex in encoded:
            real = set(ex.real_tokens())
            seen |= real
            for token in real:
                df[token] = df.get(token, 0) + 1
        tokens = sorted(seen)
        return cls(tokens, document_frequency=df, documents=len(encoded))

    def __len__(self) -> int:
        return len(self.tokens)

    def idf(self, token: str) -> float:
        # smoothed idf, always positive
        df = self.document_frequency.get(token, 0)
        return math.log((1 + self.documents) / (1 + df)) + 1.0


def featurize(
    encoded: EncodedExample, vocab: Vocabulary, weighting: str = "counts"
) -> FeatureVector:
    if weighting not in WEIGHTINGS:
        raise ConfigError(f"weighting must be one of {WEIGHTINGS}, got {weighting!r}")
    counts: dict[int, float] = {}
    tokens = encoded.real_tokens()
    for token in tokens:
        idx = vocab.index.get(token)
        if idx is not None:
            counts[idx] = counts.get(idx, 0.0) + 1.0
    if weighting == "tfidf":
        counts = {idx: c * vocab.idf(vocab.tokens[idx]) for idx, c in counts.items()}
    indices = tuple(sorted(counts))
    return FeatureVector(
        indices=indices, weights=tuple(counts[i] for i in indices), dim=len(vocab)
    )


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.5
    epochs: int = 10
    l2: float = 1e-4
    seed: int = 42
    weighting: str = "counts"

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if self.epochs < 0:
            raise ConfigError("epochs must be non-negative")
        if self.l2 < 0:
            raise ConfigError("l2 must be non-negative")
        if self.weighting not in WEIGHTINGS:
            raise ConfigError(f"weighting must be one of {WEIGHTINGS}")


@dataclass
class ModelParams:
    weights: np.ndarray  # (4, dim)
    bias: np.ndarray  # (4,)
    config: TrainConfig

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weights.ndim != 2 or self.weights.shape[0] != N_CLASSES:
            raise ConfigError(f"weights must be ({N_CLASSES}, dim)")
        if self.bias.shape != (N_CLASSES,):
            raise ConfigError(f"bias must be ({N_CLASSES},)")
        if not (np.isfinite(self.weights).all() and np.isfinite(self.bias).all()):
            raise ConfigError("parameters must be finite")

    @property
    def dim(self) -> int:
        return self.weights.shape[1]

    @classmethod
    def zeros(cls, dim: int, config: TrainConfig = TrainConfig()) -> "ModelParams":
        return cls(weights=np.zeros((N_CLASSES, dim)), bias=np.zeros(N_CLASSES), config=config)


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def predict_proba(params: ModelParams, features: FeatureVector) -> np.ndarray:
    """Class probabilities for one example; entries sum to 1."""
    if features.dim != params.dim:
        raise CtxwinError(f"feature dim {features.dim} != model dim {params.dim}")
    logits = params.weights @ features.dense() + params.bias
    return _softmax(logits)


def _stack(batch: Sequence[FeatureVector], dim: int) -> np.ndarray:
    x = np.zeros((len(batch), dim))
    for row, fv in enumerate(batch):
        if fv.dim != dim:
            raise CtxwinError(f"feature dim {fv.dim} != model dim {dim}")
        if fv.indices:
            x[row, list(fv.indices)] = fv.weights
    return x


def _one_hot(labels: Sequence[int]) -> np.ndarray:
    y = np.zeros((len(labels), N_CLASSES))
    for row, label in enumerate(labels):
        if not 0 <= label < N_CLASSES:
            raise CtxwinError(f"label index {label} out of range")
        y[row, label] = 1.0
    return y


def loss(params: ModelParams, batch: Sequence[FeatureVector], labels: Sequence[int]) -> float:
    """Mean cross-entropy plus the l2 penalty on the weights."""
    x = _stack(batch, params.dim)
    y = _one_hot(labels)
    # divergence shows up as a non-finite result; overflow here is reported
    # by the caller, not warned about
    with np.errstate(over="ignore", invalid="ignore"):
        logits = x @ params.weights.T + params.bias
        log_norm = np.log(np.exp(logits - logits.max(axis=1, keepdims=True)).sum(axis=1))
        log_probs = logits - logits.max(axis=1, keepdims=True) - log_norm[:, None]
        ce = -float((y * log_probs).sum() / len(labels))
        return ce + 0.5 * params.config.l2 * float((params.weights**2).sum())


def gradient(
    params: ModelParams, batch: Sequence[FeatureVector], labels: Sequence[int]
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradient of :func:`loss` w.r.t. (weights, bias)."""
    x = _stack(batch, params.dim)
    y = _one_hot(labels)
    probs = _softmax(x @ params.weights.T + params.bias)
    delta = (probs - y) / len(labels)
    grad_w = delta.T @ x + params.config.l2 * params.weights
    grad_b = delta.sum(axis=0)
    return grad_w, grad_b


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    loss: float
    train_accuracy: float


@dataclass
class TrainResult:
    params: ModelParams
    history: tuple[EpochStats, ...]


def train(
    batch: Sequence[FeatureVector],
    labels: Sequence[int],
    config: TrainConfig = TrainConfig(),
    on_epoch: Callable[[EpochStats, ModelParams], None] | None = None,
) -> TrainResult:
    """Full-batch gradient descent from zero initialization.

    Deterministic for a fixed configuration; raises
    :class:`TrainingDivergedError` if the loss stops being finite.
    """
    if not batch:
        raise CtxwinError("training set is empty")
    if len(batch) != len(labels):
        raise CtxwinError("batch and labels lengths differ")
    params = ModelParams.zeros(batch[0].dim, config)
    x = _stack(batch, params.dim)
    y = _one_hot(labels)
    labels_arr = np.asarray(labels)

    history: list[EpochStats] = []
    for epoch in range(1, config.epochs + 1):
        probs = _softmax(x @ params.weights.T + params.bias)
        delta = (probs - y) / len(labels)
        params.weights = params.weights - config.learning_rate * (
            delta.T @ x + config.l2 * params.weights
        )
        params.bias = params.bias - config.learning_rate * delta.sum(axis=0)

        epoch_loss = loss(params, batch, labels)
        if not math.isfinite(epoch_loss):
            raise TrainingDivergedError(epoch, epoch_loss)
        preds = np.argmax(x @ params.weights.T + params.bias, axis=1)
        stats = EpochStats(
            epoch=epoch,
            loss=epoch_loss,
            train_accuracy=float((preds == labels_arr).mean()),
        )
        history.append(stats)
        if on_epoch is not None:
            on_epoch(stats, params)
    return TrainResult(params=params, history=tuple(history))


def predict(params: ModelParams, batch: Sequence[FeatureVector]) -> np.ndarray:
    x = _stack(batch, params.dim)
    return np.argmax(x @ params.weights.T + params.bias, axis=1)


# --------------------------------------------------------------------------
# checkpoint bundle: everything eval needs to reproduce the input pipeline


@dataclass
class ModelBundle:
    params: ModelParams
    vocab: Vocabulary
    encoding: EncodingSpec
    strategy: str = "unknown"

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = {
            "format": MODEL_FORMAT,
            "classes": [label.value for label in CLASS_LABELS],
            "strategy": self.strategy,
            "encoding": {
                "max_length": self.encoding.max_length,
                "pad_token": self.encoding.pad_token,
                "segment_tags": list(self.encoding.segment_tags),
                "keep_stopwords": self.encoding.keep_stopwords,
            },
            "train_config": {
                "learning_rate": self.params.config.learning_rate,
                "epochs": self.params.config.epochs,
                "l2": self.params.config.l2,
                "seed": self.params.config.seed,
                "weighting": self.params.config.weighting,
            },
            "vocab": list(self.vocab.tokens),
            "document_frequency": {
                t: self.vocab.document_frequency.get(t, 0) for t in self.vocab.tokens
            },
            "documents": self.vocab.documents,
            "weights": self.params.weights.tolist(),
            "bias": self.params.bias.tolist(),
        }
        path.write_text(
            json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=1) + "\n",
            encoding="utf-8",
        )
        return path

    @classmethod
    def load(cls, path: str | Path) -> "ModelBundle":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        if obj.get("format") != MODEL_FORMAT:
            raise CtxwinError(f"unsupported model format {obj.get('format')!r}")
        config = TrainConfig(**obj["train_config"])
        params = ModelParams(
            weights=np.asarray(obj["weights"]), bias=np.asarray(obj["bias"]), config=config
        )
        vocab = Vocabulary(
            obj["vocab"],
            document_frequency=obj.get("document_frequency", {}),
            documents=obj.get("documents", 0),
        )
        encoding = EncodingSpec(
            max_length=obj["encoding"]["max_length"],
            pad_token=obj["encoding"]["pad_token"],
            segment_tags=tuple(obj["encoding"]["segment_tags"]),
            keep_stopwords=obj["encoding"]["keep_stopwords"],
        )
        return cls(params=params, vocab=vocab, encoding=encoding, strategy=obj.get("strategy", "unknown"))
