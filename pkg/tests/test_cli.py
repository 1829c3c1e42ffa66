from __future__ import annotations

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from ctxwin.cli import cli, main, parse_sections
from ctxwin.manifest import read_manifest


@pytest.fixture()
def runner():
    return CliRunner()


def run_ok(runner, args):
    result = runner.invoke(cli, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result


def run_pipeline(runner, root: Path, seed=7, epochs=3, strategy=("--strategy", "ewn", "--n", "2")):
    """generate -> build -> split -> train -> eval under one root directory."""
    config = {
        "documents": 80,
        "seed": seed,
        "label_signal": 0.8,
        "annotation_density": 0.8,
    }
    config_path = root / "generator.json"
    config_path.parent.mkdir(parents=True, exist_ok=True)
    config_path.write_text(json.dumps(config))
    run_ok(runner, ["generate", "--out", str(root / "corpus"), "--config", str(config_path)])
    run_ok(
        runner,
        [
            "build",
            "--corpus", str(root / "corpus" / "corpus.jsonl"),
            *strategy,
            "--out", str(root / "built"),
        ],
    )
    run_ok(
        runner,
        [
            "split",
            "--dataset", str(root / "built" / "dataset.jsonl"),
            "--out", str(root / "splits"),
        ],
    )
    run_ok(
        runner,
        [
            "train",
            "--train", str(root / "splits" / "train.jsonl"),
            "--eval", str(root / "splits" / "test.jsonl"),
            "--out", str(root / "run"),
            "--strategy", "ewn2",
            "--epochs", str(epochs),
        ],
    )
    run_ok(
        runner,
        [
            "eval",
            "--model", str(root / "run" / "model.json"),
            "--data", str(root / "splits" / "test.jsonl"),
            "--out", str(root / "eval"),
        ],
    )


def tree_bytes(root: Path) -> dict[str, bytes]:
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


class TestParseSections:
    def test_range(self):
        assert parse_sections("0-4") == frozenset({0, 1, 2, 3, 4})

    def test_mixed(self):
        assert parse_sections("1,3,5-7") == frozenset({1, 3, 5, 6, 7})

    def test_invalid(self):
        from ctxwin.errors import ConfigError

        with pytest.raises(ConfigError):
            parse_sections("abc")
        with pytest.raises(ConfigError):
            parse_sections("")


class TestPipeline:
    def test_full_pipeline_produces_artifacts(self, runner, tmp_path):
        run_pipeline(runner, tmp_path / "exp")
        root = tmp_path / "exp"
        assert (root / "corpus" / "corpus.jsonl").exists()
        assert (root / "corpus" / "corpus.sentences.jsonl").exists()
        assert (root / "built" / "dataset.jsonl").exists()
        assert (root / "splits" / "train.jsonl").exists()
        assert (root / "run" / "model.json").exists()
        assert (root / "run" / "metrics_epoch_01.json").exists()
        assert (root / "run" / "metrics_final.json").exists()
        assert (root / "eval" / "metrics_final.json").exists()
        for stage in ("corpus", "built", "splits", "run", "eval"):
            manifest = read_manifest(root / stage)
            assert manifest["tool"]["name"] == "ctxwin"
            for entry in manifest["outputs"].values():
                assert (root / stage / entry["path"]).resolve().exists()

    def test_pipeline_is_deterministic_across_roots(self, runner, tmp_path):
        run_pipeline(runner, tmp_path / "a")
        run_pipeline(runner, tmp_path / "b")
        assert tree_bytes(tmp_path / "a") == tree_bytes(tmp_path / "b")

    def test_metrics_final_schema(self, runner, tmp_path):
        run_pipeline(runner, tmp_path / "exp")
        obj = json.loads((tmp_path / "exp" / "run" / "metrics_final.json").read_text())
        assert list(obj) == [
            "model", "strategy", "epoch", "accuracy", "precision_w",
            "recall_w", "f1_w", "f1_macro", "per_class", "seed",
        ]
        assert obj["strategy"] == "ewn2"
        assert 0.0 <= obj["accuracy"] <= 1.0


class TestCompare:
    def test_identical_run_groups_not_significant(self, runner, tmp_path):
        root = tmp_path / "exp"
        run_pipeline(runner, root, epochs=2)
        # two runs per side so each sample has n >= 2
        group = tmp_path / "group"
        for i in range(2):
            target = group / f"run{i}"
            target.mkdir(parents=True)
            (target / "metrics_final.json").write_bytes(
                (root / "run" / "metrics_final.json").read_bytes()
            )
        result = run_ok(
            runner,
            ["compare", str(group), str(group), "--metric", "accuracy", "--alpha", "0.05",
             "--out", str(tmp_path / "cmp")],
        )
        assert "not significant" in result.output
        obj = json.loads((tmp_path / "cmp" / "comparison.json").read_text())
        assert obj["p_value"] == 1.0
        assert obj["significant"] is False
        assert obj["degenerate"] is True
        assert obj["t"] is None

    def test_single_run_per_side_rejected(self, runner, tmp_path):
        root = tmp_path / "exp"
        run_pipeline(runner, root, epochs=2)
        code = main(["compare", str(root / "run"), str(root / "run")])
        assert code == 1


class TestReport:
    def test_report_writes_table_and_figures(self, runner, tmp_path):
        root = tmp_path / "exp"
        run_pipeline(runner, root, epochs=3)
        run_ok(runner, ["report", str(root / "run"), "--out", str(root / "report")])
        report_dir = root / "report"
        assert (report_dir / "metrics.csv").exists()
        for figure in ("accuracy.png", "f1_weighted.png", "f1_macro.png"):
            assert (report_dir / figure).stat().st_size > 0
        header, *rows = (report_dir / "metrics.csv").read_text().strip().splitlines()
        assert header.startswith("run,model,strategy,seed,epoch,accuracy")
        assert len(rows) == 3


class TestFailureModes:
    def test_invalid_strategy_combination_fails_before_writing(self, tmp_path, capsys):
        corpus = tmp_path / "corpus.jsonl"
        corpus.write_text("")
        out = tmp_path / "out"
        code = main(
            ["build", "--corpus", str(corpus), "--strategy", "ewn", "--n", "3",
             "--out", str(out)]
        )
        assert code == 1
        assert not out.exists()
        err = json.loads(capsys.readouterr().err)
        assert err["error"]["type"] == "ConfigError"
        assert "ewn requires n" in err["error"]["message"]

    def test_dn_without_n_fails(self, tmp_path, capsys):
        corpus = tmp_path / "corpus.jsonl"
        corpus.write_text("")
        code = main(
            ["build", "--corpus", str(corpus), "--strategy", "dn", "--out", str(tmp_path / "o")]
        )
        assert code == 1
        assert "requires --n" in capsys.readouterr().err

    def test_overlapping_split_sections_fail(self, tmp_path, capsys):
        data = tmp_path / "data.jsonl"
        data.write_text("")
        code = main(
            ["split", "--dataset", str(data), "--train-sections", "0-22",
             "--test-sections", "22", "--out", str(tmp_path / "o")]
        )
        assert code == 1
        assert not (tmp_path / "o").exists()
        assert "overlap" in capsys.readouterr().err

    def test_missing_input_is_usage_error(self, capsys):
        code = main(["build", "--corpus", "/nonexistent/corpus.jsonl",
                     "--strategy", "baseline", "--out", "/tmp/nope"])
        assert code == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"]["type"] == "usage"

    def test_schema_violation_surfaces_line(self, runner, tmp_path, capsys):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"arg1": "a"}\n')
        code = main(["split", "--dataset", str(bad), "--out", str(tmp_path / "o")])
        assert code == 1
        assert "line 1" in capsys.readouterr().err

    def test_version_flag(self, runner):
        result = runner.invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert "ctxwin" in result.output
