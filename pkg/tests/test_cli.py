"""CLI behavior: exit codes, file outputs, manifests, command chaining."""

from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from collabel.cli import main
from collabel.evalreport import read_predictions
from collabel.records import load_dataset

from conftest import DEMO_DATA, REPO_ROOT, write_jsonl

RECORDS = str(DEMO_DATA / "theses.jsonl")
MAPPING = str(DEMO_DATA / "colleges.json")
TRAIN_TOML = str(REPO_ROOT / "demos" / "config" / "train.toml")
GRID_TOML = str(REPO_ROOT / "demos" / "config" / "gridsearch_small.toml")


@pytest.fixture(scope="module")
def runner() -> CliRunner:
    return CliRunner()


def invoke(runner, *args, expect: int = 0):
    result = runner.invoke(main, [str(a) for a in args])
    if result.exit_code != expect:  # pragma: no cover - debugging aid
        raise AssertionError(
            f"exit {result.exit_code} != {expect} for {args}\noutput:\n{result.output}"
            + (f"\nexception: {result.exception!r}" if result.exception else "")
        )
    return result


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("cli")


@pytest.fixture(scope="module")
def labeled_path(runner, workdir):
    out = workdir / "labeled.jsonl"
    invoke(runner, "label", "--in", RECORDS, "--mapping", MAPPING, "--out", out)
    return out


@pytest.fixture(scope="module")
def batches_path(runner, workdir, labeled_path):
    out = workdir / "batches.json"
    invoke(
        runner, "sample", "--in", labeled_path, "--mapping", MAPPING,
        "--out", out, "--seed", 11,
    )
    return out


@pytest.fixture(scope="module")
def predictions_path(runner, workdir, batches_path):
    out = workdir / "mock_preds.csv"
    invoke(
        runner, "classify-llm", "--in", batches_path, "--mapping", MAPPING,
        "--out", out, "--endpoint", "mock:perfect",
    )
    return out


@pytest.fixture(scope="module")
def score_path(runner, workdir, predictions_path):
    out = workdir / "mock_score.json"
    invoke(runner, "score", "--in", predictions_path, "--mapping", MAPPING, "--out", out)
    return out


@pytest.fixture(scope="module")
def model_path(runner, workdir, labeled_path):
    out = workdir / "model.json"
    invoke(
        runner, "train", "--in", labeled_path, "--out", out, "--config", TRAIN_TOML,
    )
    return out


# ---------------------------------------------------------------------------
# ingest / label


def test_ingest_round_trips_records(runner, workdir):
    out = workdir / "ingested.jsonl"
    result = invoke(runner, "ingest", "--in", RECORDS, "--out", out)
    assert "ingested 86 records" in result.output
    assert len(load_dataset(out)) == 86
    manifest = json.loads((workdir / "ingested.jsonl.manifest.json").read_text())
    assert manifest["subcommand"] == "ingest"
    assert str(out) in manifest["outputs"]


def test_ingest_csv_format(runner, tmp_path):
    src = tmp_path / "rows.csv"
    src.write_text(
        "id,title,keywords,department\n"
        't9,Modal Logic,"logic;proofs",Philosophy\n'
    )
    out = tmp_path / "rows.jsonl"
    invoke(runner, "ingest", "--in", src, "--out", out, "--format", "csv")
    dataset = load_dataset(out)
    assert dataset.records[0].keywords == ("logic", "proofs")


def test_missing_required_flag_exits_2(runner):
    result = runner.invoke(main, ["ingest", "--in", RECORDS])
    assert result.exit_code == 2
    assert "--out" in result.output


def test_nonexistent_input_exits_2(runner, tmp_path):
    result = runner.invoke(
        main, ["ingest", "--in", str(tmp_path / "nope.jsonl"), "--out", str(tmp_path / "o")]
    )
    assert result.exit_code == 2


def test_duplicate_id_exits_1(runner, tmp_path):
    src = write_jsonl(
        tmp_path / "dup.jsonl",
        [{"id": "t1", "title": "A"}, {"id": "t1", "title": "B"}],
    )
    result = runner.invoke(main, ["ingest", "--in", str(src), "--out", str(tmp_path / "o")])
    assert result.exit_code == 1
    assert "duplicate record id 't1'" in result.output


def test_parse_error_names_file_and_row(runner, tmp_path):
    src = tmp_path / "bad.jsonl"
    src.write_text('{"id": "t1", "title": "A"}\n{"id": "t2"}\n')
    result = runner.invoke(main, ["ingest", "--in", str(src), "--out", str(tmp_path / "o")])
    assert result.exit_code == 1
    assert f"{src}:2" in result.output


def test_label_prints_class_distribution(runner, workdir, labeled_path):
    # invoke again to capture stdout (the fixture already produced the file)
    out = workdir / "labeled_again.jsonl"
    result = invoke(runner, "label", "--in", RECORDS, "--mapping", MAPPING, "--out", out)
    assert json.loads(result.output) == {
        "CE": 12, "CFA": 12, "DCHSS": 12, "Heinz": 11,
        "MCS": 10, "SCS": 15, "Tepper": 12, "missing": 2,
    }
    labeled = load_dataset(labeled_path)
    assert all(rec.college is not None for rec in labeled)


# ---------------------------------------------------------------------------
# featurize / train / gridsearch / predict


def test_featurize_writes_matrix_and_sidecars(runner, workdir, labeled_path):
    out = workdir / "features.mtx"
    result = invoke(runner, "featurize", "--in", labeled_path, "--out", out)
    assert result.output.startswith("86 documents x ")
    assert out.exists()
    assert (workdir / "features.mtx.vocab.tsv").exists()
    assert (workdir / "features.mtx.rows.txt").exists()


def test_train_writes_model_and_holdout(runner, workdir, model_path):
    doc = json.loads(model_path.read_text())
    assert doc["format"] == "collabel-model"
    assert len(doc["ensemble"]["class_labels"]) == 7
    holdout = workdir / "model.json.holdout.jsonl"
    assert holdout.exists()
    holdout_set = load_dataset(holdout)
    assert 0 < len(holdout_set) < 84
    manifest = json.loads((workdir / "model.json.manifest.json").read_text())
    assert manifest["config"]["train"]["num_round"] == 40
    assert manifest["config"]["split"]["train_fraction"] == 0.8


def test_train_flat_config_and_seed_override(runner, tmp_path, labeled_path):
    config = tmp_path / "flat.toml"
    config.write_text("max_depth = 2\nnum_round = 3\neta = 0.3\n")
    out = tmp_path / "m.json"
    result = invoke(
        runner, "train", "--in", labeled_path, "--out", out,
        "--config", config, "--seed", 123,
    )
    assert "trained 3 rounds" in result.output
    assert not (tmp_path / "m.json.holdout.jsonl").exists()
    manifest = json.loads((tmp_path / "m.json.manifest.json").read_text())
    assert manifest["seeds"] == {"seed": 123}
    assert manifest["config"]["train"]["max_depth"] == 2


def test_gridsearch_writes_table_and_best(runner, tmp_path, labeled_path):
    out = tmp_path / "cv.csv"
    result = invoke(
        runner, "gridsearch", "--in", labeled_path, "--out", out,
        "--config", GRID_TOML, "--folds", 2,
    )
    assert "4 grid points" in result.output
    lines = out.read_text().splitlines()
    assert len(lines) == 5  # header + one row per grid point
    assert lines[0] == "max_depth,num_round,fold_0,fold_1,mean_logloss"
    best = json.loads((tmp_path / "cv.csv.best.json").read_text())
    assert best["max_depth"] in (2, 4)
    assert best["num_round"] in (20, 40)
    assert "lambda" in best


def test_gridsearch_without_grid_table_exits_2(runner, tmp_path, labeled_path):
    config = tmp_path / "nogrid.toml"
    config.write_text("[defaults]\neta = 0.3\n")
    result = runner.invoke(
        main,
        ["gridsearch", "--in", str(labeled_path), "--out", str(tmp_path / "cv.csv"),
         "--config", str(config)],
    )
    assert result.exit_code == 2
    assert "[grid]" in result.output


def test_predict_scores_cleanly_on_holdout(runner, workdir, model_path):
    holdout = workdir / "model.json.holdout.jsonl"
    preds_path = workdir / "gbt_preds.csv"
    result = invoke(
        runner, "predict", "--in", holdout, "--model", model_path,
        "--out", preds_path, "--model-name", "gbt",
    )
    n_holdout = len(load_dataset(holdout))
    assert f"{n_holdout} predictions" in result.output
    preds = read_predictions(preds_path)
    assert len(preds) == n_holdout
    assert preds.models() == ("gbt",)
    score_out = workdir / "gbt_score.json"
    invoke(runner, "score", "--in", preds_path, "--mapping", MAPPING, "--out", score_out)
    doc = json.loads(score_out.read_text())
    assert doc["reports"][0]["model"] == "gbt"


def test_predict_unlabeled_records_score_as_missing(runner, workdir, model_path, tmp_path):
    # full demo set includes unlabeled records -> true label "missing",
    # which the mapping-validated scorer must reject
    preds_path = tmp_path / "all_preds.csv"
    invoke(runner, "predict", "--in", RECORDS, "--model", model_path, "--out", preds_path)
    rows = read_predictions(preds_path)
    assert any(r.true_label == "missing" for r in rows)
    result = runner.invoke(
        main,
        ["score", "--in", str(preds_path), "--mapping", MAPPING, "--out", str(tmp_path / "s.json")],
    )
    assert result.exit_code == 1
    assert "missing" in result.output


# ---------------------------------------------------------------------------
# sampling and the chat-endpoint chain


def test_sample_writes_batches(runner, workdir, batches_path):
    result = invoke(
        runner, "sample", "--in", workdir / "labeled.jsonl", "--mapping", MAPPING,
        "--out", workdir / "batches_echo.json", "--seed", 11,
    )
    assert "5 batches of 70 documents" in result.output
    payload = json.loads(batches_path.read_text())
    assert payload["format"] == "collabel-batches"
    assert len(payload["batches"]) == 5


def test_sample_requires_seed(runner, workdir):
    result = runner.invoke(
        main,
        ["sample", "--in", str(workdir / "labeled.jsonl"), "--mapping", MAPPING,
         "--out", str(workdir / "x.json")],
    )
    assert result.exit_code == 2
    assert "--seed" in result.output


def test_sample_deterministic_bytes(runner, tmp_path, labeled_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    for out in (a, b):
        invoke(
            runner, "sample", "--in", labeled_path, "--mapping", MAPPING,
            "--out", out, "--seed", 42, "--n-samples", 2, "--per-college", 3,
        )
    assert a.read_bytes() == b.read_bytes()


def test_prompt_renders_batch_files(runner, tmp_path, batches_path):
    out_dir = tmp_path / "prompts"
    result = invoke(
        runner, "prompt", "--in", batches_path, "--mapping", MAPPING,
        "--variant", "bracketed", "--out", out_dir,
    )
    assert "5 prompts" in result.output
    files = sorted(p.name for p in out_dir.glob("*.prompt.txt"))
    assert files == [f"sample_{i:02d}.prompt.txt" for i in range(1, 6)]
    text = (out_dir / "sample_01.prompt.txt").read_text()
    assert "{" in text and text.endswith("}\n")
    assert (out_dir / "manifest.json").exists()


def test_classify_llm_perfect_round_trip(runner, workdir, predictions_path):
    preds = read_predictions(predictions_path)
    assert len(preds) == 350
    assert all(r.predicted_label == r.true_label for r in preds)
    assert (workdir / "mock_preds.csv.failures.log").read_text() == ""


def test_classify_llm_fault_excludes_batch(runner, tmp_path, batches_path):
    out = tmp_path / "faulty.csv"
    result = invoke(
        runner, "classify-llm", "--in", batches_path, "--mapping", MAPPING,
        "--out", out, "--endpoint", "mock:extra=2@1",
    )
    assert "280 predictions from 4/5 batches" in result.output
    log_text = (tmp_path / "faulty.csv.failures.log").read_text()
    assert log_text == "sample 1: CountMismatch: expected 70 labels, got 72\n"
    preds = read_predictions(out)
    assert sorted({r.sample_id for r in preds}) == [2, 3, 4, 5]


def test_classify_llm_run_dir_archives(runner, tmp_path, batches_path):
    out = tmp_path / "p.csv"
    run_dir = tmp_path / "run"
    invoke(
        runner, "classify-llm", "--in", batches_path, "--mapping", MAPPING,
        "--out", out, "--endpoint", "mock:perfect", "--run-dir", run_dir,
    )
    assert sorted(p.name for p in run_dir.glob("*.prompt.txt")) == [
        f"sample_{i:02d}.prompt.txt" for i in range(1, 6)
    ]
    assert len(list(run_dir.glob("*.response.txt"))) == 5


def test_classify_llm_bad_endpoint_spec_exits_2(runner, tmp_path, batches_path):
    result = runner.invoke(
        main,
        ["classify-llm", "--in", str(batches_path), "--mapping", MAPPING,
         "--out", str(tmp_path / "x.csv"), "--endpoint", "definitely/not/a/file.toml"],
    )
    assert result.exit_code == 2
    assert "neither a mock spec nor an existing file" in result.output


def test_classify_llm_bad_mock_grammar_exits_2(runner, tmp_path, batches_path):
    result = runner.invoke(
        main,
        ["classify-llm", "--in", str(batches_path), "--mapping", MAPPING,
         "--out", str(tmp_path / "x.csv"), "--endpoint", "mock:exxtra"],
    )
    assert result.exit_code == 2
    assert "bad mock fault" in result.output


# ---------------------------------------------------------------------------
# score / report


def test_score_output_shape(runner, score_path):
    doc = json.loads(score_path.read_text())
    assert doc["format"] == "collabel-score"
    assert doc["version"] == 1
    (entry,) = doc["reports"]
    assert entry["model"] == "mock"
    assert entry["overall"] == 1.0
    assert entry["per_sample"] == [1.0] * 5
    assert all(acc == 1.0 and sup == 50 for acc, sup in entry["per_class"].values())
    assert "confusion" in entry


def test_report_markdown(runner, tmp_path, score_path):
    out = tmp_path / "report.md"
    result = invoke(runner, "report", "--in", score_path, "--out", out)
    assert "1 model(s)" in result.output
    lines = out.read_text().splitlines()
    assert lines[0] == "| Model | CE | CFA | DCHSS | Heinz | MCS | SCS | Tepper | Overall |"
    assert lines[2] == "| mock | 1.000 | 1.000 | 1.000 | 1.000 | 1.000 | 1.000 | 1.000 | 1.000 |"


def test_report_csv_and_plotdata(runner, tmp_path, score_path):
    csv_out = tmp_path / "report.csv"
    invoke(runner, "report", "--in", score_path, "--format", "csv", "--out", csv_out)
    lines = csv_out.read_text().splitlines()
    assert lines[0] == "model,label,accuracy,support"
    assert len(lines) == 1 + 7 + 1  # header, one per class, Overall
    plot_out = tmp_path / "plot.csv"
    invoke(runner, "report", "--in", score_path, "--format", "plotdata", "--out", plot_out)
    # text-mode read translates the csv module's \r\n line endings
    assert plot_out.read_text() == "model,mean,std\nmock,1.0,0.0\n"


def test_report_merges_multiple_models(runner, tmp_path, score_path):
    doc = json.loads(score_path.read_text())
    doc["reports"][0]["model"] = "mock2"
    second = tmp_path / "second.json"
    second.write_text(json.dumps(doc))
    out = tmp_path / "combined.md"
    result = invoke(
        runner, "report", "--in", score_path, "--in", second, "--out", out
    )
    assert "2 model(s)" in result.output
    text = out.read_text()
    assert "| mock |" in text
    assert "| mock2 |" in text


def test_report_rejects_non_score_json(runner, tmp_path):
    bogus = tmp_path / "other.json"
    bogus.write_text('{"format": "something", "reports": []}')
    result = runner.invoke(
        main, ["report", "--in", str(bogus), "--out", str(tmp_path / "r.md")]
    )
    assert result.exit_code == 1
    assert "not a collabel-score file" in result.output


def test_report_unknown_format_exits_1(runner, tmp_path, score_path):
    result = runner.invoke(
        main,
        ["report", "--in", str(score_path), "--format", "pdf", "--out", str(tmp_path / "r.pdf")],
    )
    assert result.exit_code == 1
    assert "unsupported output format" in result.output


# ---------------------------------------------------------------------------
# top level


def test_version_flag(runner):
    result = invoke(runner, "--version")
    assert "collabel" in result.output


def test_help_lists_all_subcommands(runner):
    result = invoke(runner, "--help")
    for name in (
        "ingest", "label", "featurize", "train", "gridsearch", "predict",
        "sample", "prompt", "classify-llm", "score", "report",
    ):
        assert name in result.output
