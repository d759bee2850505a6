import json
from pathlib import Path

import pytest

from relboost.cli import _parse_alpha_grid, main
from relboost.datasets import make_synthetic_records
from relboost.errors import ConfigError
from relboost.pipeline import render_records


def read(path: Path) -> str:
    return path.read_text(encoding="utf-8")


def run_ok(argv):
    assert main(argv) == 0


@pytest.fixture(scope="module")
def records_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "raw.jsonl"
    path.write_text(render_records(make_synthetic_records(10, 4, seed=42)))
    return path


@pytest.fixture(scope="module")
def task_dir(tmp_path_factory, records_file):
    """Preprocessed learning task shared by the training-stage tests."""
    out = tmp_path_factory.mktemp("task")
    run_ok(
        [
            "preprocess",
            "--records",
            str(records_file),
            "--out",
            str(out),
            "--min-pubs",
            "2",
            "--validation-ratio",
            "0.25",
            "--flip-pos",
            "0.5",
            "--flip-neg",
            "0.25",
            "--seed",
            "3",
        ]
    )
    return out


@pytest.fixture(scope="module")
def model_dir(tmp_path_factory, task_dir):
    out = tmp_path_factory.mktemp("model")
    run_ok(
        [
            "train",
            "--facts",
            str(task_dir / "facts.pl"),
            "--examples",
            str(task_dir / "train.pl"),
            "--advice",
            "default",
            "--trees",
            "2",
            "--max-depth",
            "2",
            "--min-leaf",
            "4",
            "--seed",
            "3",
            "--out",
            str(out),
        ]
    )
    return out


class TestIngestAndStats:
    def test_ingest_writes_normalized_records(self, records_file, tmp_path):
        run_ok(["ingest", "--records", str(records_file), "--out", str(tmp_path)])
        assert (tmp_path / "records.jsonl").exists()
        manifest = json.loads(read(tmp_path / "manifest.json"))
        assert manifest["command"] == "ingest"
        assert manifest["records"] == str(records_file)
        # ingest of an already-normalized file is the identity
        assert read(tmp_path / "records.jsonl") == read(records_file)

    def test_stats_histogram(self, records_file, tmp_path):
        run_ok(["stats", "--records", str(records_file), "--out", str(tmp_path)])
        stats = json.loads(read(tmp_path / "stats.json"))
        assert stats["n_authors"] == 10
        assert stats["n_records"] == 40
        assert stats["histogram"] == {"4": 10}
        text = read(tmp_path / "stats.txt")
        assert "total authors: 10" in text


class TestPreprocess:
    def test_outputs(self, task_dir):
        for name in (
            "records.jsonl",
            "schema.pl",
            "facts.pl",
            "train.pl",
            "test.pl",
            "validation.pl",
            "manifest.json",
        ):
            assert (task_dir / name).exists(), name
        train_text = read(task_dir / "train.pl")
        assert train_text.count("pos: ") > 0
        assert train_text.count("neg: ") > 0

    def test_seed_reproducibility(self, records_file, tmp_path):
        args = [
            "preprocess",
            "--records",
            str(records_file),
            "--min-pubs",
            "2",
            "--seed",
            "9",
        ]
        run_ok(args + ["--out", str(tmp_path / "a")])
        run_ok(args + ["--out", str(tmp_path / "b")])
        for name in ("facts.pl", "train.pl", "test.pl"):
            assert read(tmp_path / "a" / name) == read(tmp_path / "b" / name)

    def test_different_seed_changes_split(self, records_file, tmp_path):
        base = [
            "preprocess",
            "--records",
            str(records_file),
            "--min-pubs",
            "2",
        ]
        run_ok(base + ["--seed", "1", "--out", str(tmp_path / "a")])
        run_ok(base + ["--seed", "2", "--out", str(tmp_path / "b")])
        assert read(tmp_path / "a" / "train.pl") != read(tmp_path / "b" / "train.pl")


class TestTrainPredictEval:
    def test_train_outputs(self, model_dir):
        model_text = read(model_dir / "model.txt")
        assert model_text.startswith("relational-boosted-model v1")
        history = json.loads(read(model_dir / "history.json"))
        assert len(history["mean_abs_gradient"]) == 2
        manifest = json.loads(read(model_dir / "manifest.json"))
        assert manifest["trees"] == 2
        assert manifest["alpha"] == 0.5

    def test_train_deterministic(self, task_dir, model_dir, tmp_path):
        manifest = json.loads(read(model_dir / "manifest.json"))
        config = tmp_path / "config.json"
        config.write_text(json.dumps(manifest))
        run_ok(["train", "--config", str(config), "--out", str(tmp_path)])
        assert read(tmp_path / "model.txt") == read(model_dir / "model.txt")

    def test_advice_changes_model(self, task_dir, model_dir, tmp_path):
        run_ok(
            [
                "train",
                "--facts",
                str(task_dir / "facts.pl"),
                "--examples",
                str(task_dir / "train.pl"),
                "--advice",
                "none",
                "--trees",
                "2",
                "--max-depth",
                "2",
                "--min-leaf",
                "4",
                "--seed",
                "3",
                "--out",
                str(tmp_path),
            ]
        )
        assert read(tmp_path / "model.txt") != read(model_dir / "model.txt")

    def test_predict(self, task_dir, model_dir, tmp_path):
        run_ok(
            [
                "predict",
                "--model",
                str(model_dir / "model.txt"),
                "--facts",
                str(task_dir / "facts.pl"),
                "--examples",
                str(task_dir / "test.pl"),
                "--out",
                str(tmp_path),
            ]
        )
        lines = read(tmp_path / "predictions.tsv").splitlines()
        n_examples = sum(
            1 for ln in read(task_dir / "test.pl").splitlines() if ln.strip()
        )
        assert len(lines) == n_examples
        for line in lines:
            atom_text, prob_text = line.split("\t")
            assert atom_text.startswith("publication(")
            assert 0.0 < float(prob_text) < 1.0

    def test_eval(self, task_dir, model_dir, tmp_path):
        run_ok(
            [
                "eval",
                "--model",
                str(model_dir / "model.txt"),
                "--facts",
                str(task_dir / "facts.pl"),
                "--examples",
                str(task_dir / "test.pl"),
                "--out",
                str(tmp_path),
            ]
        )
        metrics = json.loads(read(tmp_path / "metrics.json"))
        assert set(metrics) == {"auc_roc", "auc_pr", "n_positive", "n_negative"}
        assert 0.0 <= metrics["auc_roc"] <= 1.0
        assert metrics["n_negative"] == 2 * metrics["n_positive"]
        text = read(tmp_path / "metrics.txt")
        assert f"auc_roc: {metrics['auc_roc']:.6f}" in text


class TestSweep:
    def test_sweep_grid_and_outputs(self, task_dir, tmp_path):
        run_ok(
            [
                "sweep",
                "--facts",
                str(task_dir / "facts.pl"),
                "--train",
                str(task_dir / "train.pl"),
                "--validation",
                str(task_dir / "validation.pl"),
                "--test",
                str(task_dir / "test.pl"),
                "--alphas",
                "0.25:0.75:0.25",
                "--trees",
                "1",
                "--max-depth",
                "1",
                "--min-leaf",
                "4",
                "--seed",
                "3",
                "--out",
                str(tmp_path),
            ]
        )
        sweep = json.loads(read(tmp_path / "sweep.json"))
        assert [p["alpha"] for p in sweep["points"]] == [0.25, 0.5, 0.75]
        assert sweep["best_alpha"] in (0.25, 0.5, 0.75)
        table = read(tmp_path / "sweep.txt")
        assert table.splitlines()[0] == "alpha  auc_roc     auc_pr"

    def test_sweep_requires_advice(self, task_dir, tmp_path, capsys):
        code = main(
            [
                "sweep",
                "--facts",
                str(task_dir / "facts.pl"),
                "--train",
                str(task_dir / "train.pl"),
                "--validation",
                str(task_dir / "validation.pl"),
                "--test",
                str(task_dir / "test.pl"),
                "--advice",
                "none",
                "--out",
                str(tmp_path),
            ]
        )
        assert code == 1
        assert "error: config: sweep needs an advice set" in capsys.readouterr().err


class TestCombineCommand:
    def test_outputs(self, task_dir, model_dir, tmp_path):
        run_ok(
            [
                "combine",
                "--model",
                str(model_dir / "model.txt"),
                "--facts",
                str(task_dir / "facts.pl"),
                "--examples",
                str(task_dir / "train.pl"),
                "--top",
                "2",
                "--out",
                str(tmp_path),
            ]
        )
        text = read(tmp_path / "combined.pl")
        assert text.startswith("% combined decision list: 2 trees")
        stats = json.loads(read(tmp_path / "combined_stats.json"))
        assert stats["clauses"] >= 1
        assert len(stats["top_clause_values"]) <= 2


class TestErrorsAndConfig:
    def test_missing_required_setting(self, capsys):
        assert main(["train"]) == 1
        err = capsys.readouterr().err
        assert err.startswith("error: config: missing required settings:")

    def test_missing_file_is_io_error(self, tmp_path, capsys):
        code = main(
            ["ingest", "--records", str(tmp_path / "nope.jsonl"), "--out", str(tmp_path)]
        )
        assert code == 1
        assert capsys.readouterr().err.startswith("error: io:")

    def test_bad_records_is_data_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.jsonl"
        bad.write_text("not json\n")
        code = main(["ingest", "--records", str(bad), "--out", str(tmp_path)])
        assert code == 1
        assert capsys.readouterr().err.startswith("error: data: record 1")

    def test_bad_facts_is_parse_error(self, task_dir, tmp_path, capsys):
        bad = tmp_path / "facts.pl"
        bad.write_text("venue(p1, icml)\n")  # missing period
        code = main(
            [
                "train",
                "--facts",
                str(bad),
                "--examples",
                str(task_dir / "train.pl"),
                "--out",
                str(tmp_path),
            ]
        )
        assert code == 1
        assert capsys.readouterr().err.startswith("error: parse:")

    def test_unknown_config_key(self, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"records": "x", "out": "y", "bogus": 1}))
        assert main(["ingest", "--config", str(config)]) == 1
        err = capsys.readouterr().err
        assert "unknown keys ['bogus']" in err

    def test_flag_overrides_config(self, records_file, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(
            json.dumps(
                {
                    "records": str(records_file),
                    "out": str(tmp_path / "a"),
                    "min_pubs": 2,
                    "seed": 5,
                }
            )
        )
        run_ok(["preprocess", "--config", str(config), "--seed", "6"])
        manifest = json.loads(read(tmp_path / "a" / "manifest.json"))
        assert manifest["seed"] == 6
        assert manifest["min_pubs"] == 2

    def test_no_command_prints_help(self, capsys):
        assert main([]) == 2
        assert "usage: relboost" in capsys.readouterr().out

    def test_invalid_training_flag_value(self, task_dir, tmp_path, capsys):
        code = main(
            [
                "train",
                "--facts",
                str(task_dir / "facts.pl"),
                "--examples",
                str(task_dir / "train.pl"),
                "--alpha",
                "1.5",
                "--out",
                str(tmp_path),
            ]
        )
        assert code == 1
        assert capsys.readouterr().err.startswith("error: config:")


class TestAlphaGrid:
    def test_range_form(self):
        assert _parse_alpha_grid("0.25:0.75:0.05") == pytest.approx(
            [0.25 + 0.05 * i for i in range(11)]
        )

    def test_comma_form(self):
        assert _parse_alpha_grid("0.4, 0.6,0.8") == [0.4, 0.6, 0.8]

    @pytest.mark.parametrize("bad", ["0.5:0.2:0.1", "a,b", "0.1:0.9:0", "1:2"])
    def test_bad_grids(self, bad):
        with pytest.raises(ConfigError):
            _parse_alpha_grid(bad)
