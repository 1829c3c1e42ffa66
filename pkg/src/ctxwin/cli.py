"""Command-line pipeline: generate, build, split, train, eval, compare, report.

Every command validates its flags before touching the filesystem, writes a
manifest next to its artifacts, and exits nonzero with a machine-readable
JSON error on stderr when something is wrong.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click

from . import __version__
from .classifier import (
    ModelBundle,
    TrainConfig,
    Vocabulary,
    featurize,
    predict,
    train,
)
from .corpus import FORMATS, RelationKind, read_corpus, sentences_path_for, write_corpus
from .dataset import EncodingSpec, SplitSpec, emit_jsonl, encode_dataset, ingest_jsonl, split
from .errors import ConfigError, CtxwinError
from .manifest import write_manifest
from .metrics import (
    ConfusionMatrix,
    compute_metrics,
    read_metrics_json,
    report_from_json_dict,
    write_metrics_json,
)
from .report import collect_final_metrics, write_report
from .stats import COMPARE_METRICS, compare_models
from .synthetic import SyntheticConfig, generate_synthetic
from .windowing import Strategy, build


def parse_sections(text: str) -> frozenset[int]:
    """Parse a section set like ``0-22`` or ``2,4,6-9``."""
    sections: set[int] = set()
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if "-" in part:
                lo, hi = part.split("-", 1)
                sections.update(range(int(lo), int(hi) + 1))
            else:
                sections.add(int(part))
        except ValueError:
            raise ConfigError(f"cannot parse section spec {part!r}") from None
    if not sections:
        raise ConfigError(f"empty section spec {text!r}")
    return frozenset(sections)


def _strategy_from_flags(strategy: str, n: int | None, seed: int) -> Strategy:
    if strategy == "psrn":
        return Strategy("psrn", seed=seed)
    if strategy == "baseline":
        if n is not None:
            raise ConfigError("baseline takes no --n")
        return Strategy("baseline")
    if n is None:
        raise ConfigError(f"--strategy {strategy} requires --n")
    return Strategy(strategy, n=n)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="ctxwin")
def cli():
    """Context-window datasets for implicit discourse relation classification."""


@cli.command()
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@click.option("--documents", type=int, default=None, help="Number of documents.")
@click.option("--seed", type=int, default=None, help="Generator seed.")
@click.option("--format", "format_", type=click.Choice(FORMATS), default="record-json")
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, path_type=Path),
    default=None,
    help="JSON file with generator settings; flags override it.",
)
def generate(out_dir: Path, documents: int | None, seed: int | None, format_: str,
             config_path: Path | None):
    """Generate a synthetic corpus."""
    settings: dict = {}
    if config_path is not None:
        settings = json.loads(config_path.read_text(encoding="utf-8"))
        if "sentences_per_doc" in settings:
            settings["sentences_per_doc"] = tuple(settings["sentences_per_doc"])
        if "section_weights" in settings and settings["section_weights"] is not None:
            settings["section_weights"] = {
                int(k): float(v) for k, v in settings["section_weights"].items()
            }
    if documents is not None:
        settings["documents"] = documents
    if seed is not None:
        settings["seed"] = seed
    try:
        config = SyntheticConfig(**settings)
    except TypeError as exc:
        raise ConfigError(f"bad generator config: {exc}") from None

    corpus = generate_synthetic(config)
    ext = "pipe" if format_ == "pipe" else "jsonl"
    relations_path = out_dir / f"corpus.{ext}"
    relations_path, sentences_path = write_corpus(corpus, relations_path, format=format_)
    write_manifest(
        out_dir,
        command="generate",
        config={
            "format": format_,
            "generator": {
                **{k: (list(v) if isinstance(v, tuple) else v)
                   for k, v in config.__dict__.items() if k not in ("kind_mix", "class_mix", "section_weights")},
                "kind_mix": dict(config.kind_mix),
                "class_mix": dict(config.class_mix),
                "section_weights": (
                    {str(k): v for k, v in config.section_weights.items()}
                    if config.section_weights is not None
                    else None
                ),
            },
        },
        inputs={},
        outputs={"relations": relations_path, "sentences": sentences_path},
    )
    click.echo(
        f"generated {corpus.sentence_count()} sentences, "
        f"{corpus.relation_count()} relations in {len(corpus.documents)} documents"
    )


@cli.command("build")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--sentences", "sentences_path", type=click.Path(exists=True, path_type=Path), default=None)
@click.option("--format", "format_", type=click.Choice(FORMATS), default="record-json")
@click.option("--strategy", required=True, type=click.Choice(["baseline", "dn", "ewn", "psrn"]))
@click.option("--n", type=int, default=None, help="Window parameter for dn/ewn.")
@click.option("--seed", type=int, default=42, show_default=True, help="Sampling seed (psrn).")
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
def build_cmd(corpus_path: Path, sentences_path: Path | None, format_: str, strategy: str,
              n: int | None, seed: int, out_dir: Path):
    """Build a context-window dataset from a corpus."""
    strat = _strategy_from_flags(strategy, n, seed)
    corpus, report = read_corpus(corpus_path, sentences_path, format=format_)
    dataset = build(corpus, strat)
    dataset_path = emit_jsonl(dataset, out_dir / "dataset.jsonl")
    inputs = {"corpus": corpus_path}
    if sentences_path is not None:
        inputs["sentences"] = sentences_path
    else:
        candidate = sentences_path_for(corpus_path)
        if candidate.exists():
            inputs["sentences"] = candidate
    write_manifest(
        out_dir,
        command="build",
        config={
            "strategy": strat.name,
            "seed": seed if strat.kind == "psrn" else None,
            "format": format_,
            "implicit_relations": corpus.relation_count(RelationKind.IMPLICIT),
            "examples": len(dataset),
        },
        inputs=inputs,
        outputs={"dataset": dataset_path},
    )
    click.echo(f"built {strat.name}: {len(dataset)} examples -> {dataset_path}")


@cli.command("split")
@click.option("--dataset", "dataset_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--train-sections", default="0-22", show_default=True)
@click.option("--test-sections", default="23", show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
def split_cmd(dataset_path: Path, train_sections: str, test_sections: str, out_dir: Path):
    """Split a dataset by document section."""
    spec = SplitSpec(
        train_sections=parse_sections(train_sections),
        test_sections=parse_sections(test_sections),
    )
    dataset = ingest_jsonl(dataset_path)
    result = split(dataset, spec)
    train_path = emit_jsonl(result.train, out_dir / "train.jsonl")
    test_path = emit_jsonl(result.test, out_dir / "test.jsonl")
    write_manifest(
        out_dir,
        command="split",
        config={
            "train_sections": sorted(spec.train_sections),
            "test_sections": sorted(spec.test_sections),
            "train_examples": len(result.train),
            "test_examples": len(result.test),
            "dropped_examples": result.dropped,
        },
        inputs={"dataset": dataset_path},
        outputs={"train": train_path, "test": test_path},
    )
    click.echo(
        f"split: {len(result.train)} train / {len(result.test)} test "
        f"({result.dropped} dropped)"
    )


@cli.command("train")
@click.option("--train", "train_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--eval", "eval_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@click.option("--strategy", default="unknown", help="Strategy name stamped into metrics files.")
@click.option("--epochs", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--max-length", type=int, default=128, show_default=True)
@click.option("--learning-rate", type=float, default=0.5, show_default=True)
@click.option("--l2", type=float, default=1e-4, show_default=True)
@click.option("--weighting", type=click.Choice(["counts", "tfidf"]), default="counts")
@click.option("--keep-stopwords/--drop-stopwords", default=True, show_default=True)
def train_cmd(train_path: Path, eval_path: Path, out_dir: Path, strategy: str, epochs: int,
              seed: int, max_length: int, learning_rate: float, l2: float, weighting: str,
              keep_stopwords: bool):
    """Train the bag-of-features classifier, evaluating every epoch."""
    encoding = EncodingSpec(max_length=max_length, keep_stopwords=keep_stopwords)
    config = TrainConfig(
        learning_rate=learning_rate, epochs=epochs, l2=l2, seed=seed, weighting=weighting
    )

    train_set = ingest_jsonl(train_path, strategy=strategy)
    eval_set = ingest_jsonl(eval_path, strategy=strategy)
    if not train_set.examples:
        raise CtxwinError("training set is empty")
    if not eval_set.examples:
        raise CtxwinError("evaluation set is empty")

    train_encoded = encode_dataset(train_set, encoding)
    eval_encoded = encode_dataset(eval_set, encoding)
    vocab = Vocabulary.fit(train_encoded)
    train_features = [featurize(e, vocab, weighting) for e in train_encoded]
    eval_features = [featurize(e, vocab, weighting) for e in eval_encoded]
    train_labels = [e.label_index for e in train_encoded]
    eval_labels = [e.label_index for e in eval_encoded]

    out_dir.mkdir(parents=True, exist_ok=True)
    epoch_files: dict[str, Path] = {}
    log_rows: list[dict] = []

    def on_epoch(stats, params):
        preds = predict(params, eval_features)
        cm = ConfusionMatrix.from_predictions(eval_labels, [int(p) for p in preds])
        metrics = compute_metrics(cm)
        path = write_metrics_json(
            metrics,
            out_dir / f"metrics_epoch_{stats.epoch:02d}.json",
            model="bow-logreg",
            strategy=strategy,
            epoch=stats.epoch,
            seed=seed,
        )
        epoch_files[f"metrics_epoch_{stats.epoch:02d}"] = path
        log_rows.append(
            {"epoch": stats.epoch, "loss": stats.loss, "train_accuracy": stats.train_accuracy}
        )

    result = train(train_features, train_labels, config, on_epoch=on_epoch)

    bundle = ModelBundle(params=result.params, vocab=vocab, encoding=encoding, strategy=strategy)
    model_path = bundle.save(out_dir / "model.json")

    final_report = read_metrics_json(out_dir / f"metrics_epoch_{epochs:02d}.json") if epochs else None
    final_path = out_dir / "metrics_final.json"
    if final_report is not None:
        final_path.write_text(
            json.dumps(final_report, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
        epoch_files["metrics_final"] = final_path
    log_path = out_dir / "training_log.json"
    log_path.write_text(json.dumps(log_rows, indent=2) + "\n", encoding="utf-8")

    write_manifest(
        out_dir,
        command="train",
        config={
            "strategy": strategy,
            "epochs": epochs,
            "seed": seed,
            "max_length": max_length,
            "learning_rate": learning_rate,
            "l2": l2,
            "weighting": weighting,
            "keep_stopwords": keep_stopwords,
            "train_examples": len(train_set),
            "eval_examples": len(eval_set),
            "vocabulary": len(vocab),
        },
        inputs={"train": train_path, "eval": eval_path},
        outputs={"model": model_path, "training_log": log_path, **epoch_files},
    )
    last = result.history[-1] if result.history else None
    if last is not None:
        click.echo(
            f"trained {epochs} epochs: loss={last.loss:.4f} "
            f"train_acc={last.train_accuracy:.4f} -> {model_path}"
        )
    else:
        click.echo(f"trained 0 epochs (zero-initialized model) -> {model_path}")


@cli.command("eval")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--data", "data_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
def eval_cmd(model_path: Path, data_path: Path, out_dir: Path):
    """Evaluate a trained model on a JSONL dataset."""
    bundle = ModelBundle.load(model_path)
    data = ingest_jsonl(data_path, strategy=bundle.strategy)
    if not data.examples:
        raise CtxwinError("evaluation set is empty")
    encoded = encode_dataset(data, bundle.encoding)
    features = [featurize(e, bundle.vocab, bundle.params.config.weighting) for e in encoded]
    labels = [e.label_index for e in encoded]
    preds = predict(bundle.params, features)
    cm = ConfusionMatrix.from_predictions(labels, [int(p) for p in preds])
    metrics = compute_metrics(cm)
    metrics_path = write_metrics_json(
        metrics,
        out_dir / "metrics_final.json",
        model="bow-logreg",
        strategy=bundle.strategy,
        epoch=bundle.params.config.epochs,
        seed=bundle.params.config.seed,
    )
    write_manifest(
        out_dir,
        command="eval",
        config={"examples": len(data)},
        inputs={"model": model_path, "data": data_path},
        outputs={"metrics_final": metrics_path},
    )
    click.echo(
        f"eval: accuracy={metrics.accuracy:.4f} f1_w={metrics.f1_weighted:.4f} "
        f"f1_macro={metrics.f1_macro:.4f} -> {metrics_path}"
    )


@cli.command("compare")
@click.argument("dir_a", type=click.Path(exists=True, path_type=Path))
@click.argument("dir_b", type=click.Path(exists=True, path_type=Path))
@click.option("--metric", type=click.Choice(list(COMPARE_METRICS)), default="accuracy",
              show_default=True)
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--welch", is_flag=True, help="Use Welch's unequal-variance test.")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), default=None)
def compare_cmd(dir_a: Path, dir_b: Path, metric: str, alpha: float, welch: bool,
                out_dir: Path | None):
    """Compare final-epoch metrics of two run groups with a t-test."""
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must be in (0, 1), got {alpha}")
    runs_a = [report_from_json_dict(obj) for obj in collect_final_metrics(dir_a)]
    runs_b = [report_from_json_dict(obj) for obj in collect_final_metrics(dir_b)]
    if len(runs_a) < 2 or len(runs_b) < 2:
        raise CtxwinError(
            f"need at least two metrics_final.json per side, found {len(runs_a)} and {len(runs_b)}"
        )
    variant = "welch" if welch else "pooled"
    comparison = compare_models(runs_a, runs_b, metric=metric, alpha=alpha, variant=variant)
    t = comparison.ttest
    payload = {
        "metric": metric,
        "alpha": alpha,
        "variant": variant,
        "t": None if math.isnan(t.t) else t.t,
        "df": t.df,
        "p_value": t.p_value,
        "significant": t.significant,
        "degenerate": t.degenerate,
        "higher_mean": comparison.higher,
        "a": {"dir": str(dir_a), "runs": len(runs_a), "mean": comparison.mean_a},
        "b": {"dir": str(dir_b), "runs": len(runs_b), "mean": comparison.mean_b},
    }
    verdict = "significant" if t.significant else "not significant"
    click.echo(
        f"{metric}: mean_a={comparison.mean_a:.4f} mean_b={comparison.mean_b:.4f} "
        f"t={t.t:.4f} df={t.df:.4g} p={t.p_value:.4g} -> {verdict} at alpha={alpha} "
        f"(higher: {comparison.higher})"
    )
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        comparison_path = out_dir / "comparison.json"
        comparison_path.write_text(
            json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
        write_manifest(
            out_dir,
            command="compare",
            config={"metric": metric, "alpha": alpha, "variant": variant},
            inputs={},
            outputs={"comparison": comparison_path},
        )


@cli.command("report")
@click.argument("run_dirs", nargs=-1, required=True,
                type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
def report_cmd(run_dirs: tuple[Path, ...], out_dir: Path):
    """Render per-epoch metric curves and a delimited summary table."""
    written = write_report(list(run_dirs), out_dir)
    write_manifest(
        out_dir,
        command="report",
        config={"runs": [str(p) for p in run_dirs]},
        inputs={},
        outputs={p.name: p for p in written},
    )
    click.echo("report: " + ", ".join(str(p) for p in written))


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.Abort:
        return 130
    except click.ClickException as exc:
        _machine_error("usage", exc.format_message())
        return 2
    except CtxwinError as exc:
        _machine_error(type(exc).__name__, str(exc))
        return 1
    return 0


def _machine_error(kind: str, message: str) -> None:
    sys.stderr.write(
        json.dumps({"error": {"type": kind, "message": message}}, ensure_ascii=False) + "\n"
    )


if __name__ == "__main__":
    sys.exit(main())
