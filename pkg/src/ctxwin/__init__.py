"""Context-window dataset construction and desk-scale evaluation for
implicit discourse relation classification."""

__version__ = "0.1.0"

from .corpus import (
    Argument,
    ClassLabel,
    CLASS_LABELS,
    Corpus,
    Document,
    ParseReport,
    RelationKind,
    RelationRecord,
    SentenceRecord,
    extract_class,
    parse_corpus,
    read_corpus,
    serialize_corpus,
    write_corpus,
)
from .synthetic import SyntheticConfig, generate_synthetic
from .windowing import (
    Dataset,
    Example,
    Strategy,
    build,
    build_baseline,
    build_dn,
    build_ewn,
    build_psrn,
    build_reference,
)
from .dataset import (
    EncodedExample,
    EncodingSpec,
    SplitResult,
    SplitSpec,
    emit_jsonl,
    encode,
    encode_dataset,
    ingest_jsonl,
    split,
    tokenize,
)
from .classifier import (
    FeatureVector,
    ModelBundle,
    ModelParams,
    TrainConfig,
    TrainResult,
    Vocabulary,
    featurize,
    gradient,
    loss,
    predict,
    predict_proba,
    train,
)
from .metrics import (
    ConfusionMatrix,
    MetricsReport,
    compute_metrics,
    metrics_to_json_dict,
    read_metrics_json,
    write_metrics_json,
)
from .stats import (
    ModelComparison,
    TTestResult,
    compare_models,
    regularized_incomplete_beta,
    student_t_cdf,
    two_sample_ttest,
)

__all__ = [name for name in dir() if not name.startswith("_")]
