import hashlib
import json
from pathlib import Path

import pytest

import synthdata
from mirth.cli import main


def run_cli(*args) -> int:
    try:
        main([str(a) for a in args])
    except SystemExit as exc:
        return exc.code or 0
    return 0


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    root = tmp_path_factory.mktemp("cliwork")
    synthdata.write_lines(root / "jokes.txt", synthdata.make_jokes(120, seed=31))
    synthdata.write_lines(root / "news.txt", synthdata.make_news(120, seed=32))
    (root / "tagged.conllu").write_text(synthdata.make_conllu(250, seed=33),
                                        encoding="utf-8")
    synthdata.write_embeddings(root / "embeddings.vec", dim=16, seed=34)
    return root


@pytest.fixture(scope="module")
def pipeline(workdir):
    """Run the shared pipeline prefix once: ingest, tagger, negatives, datasets."""
    assert run_cli("ingest", "--in", workdir / "jokes.txt", "--source", "jokes",
                   "--out", workdir / "jokes") == 0
    assert run_cli("ingest", "--in", workdir / "news.txt", "--source", "news",
                   "--out", workdir / "news") == 0
    assert run_cli("train-tagger", "--conllu", workdir / "tagged.conllu",
                   "--out", workdir / "tagger.model") == 0
    assert run_cli("generate-negatives", "--jokes", workdir / "jokes/documents.jsonl",
                   "--tagger", workdir / "tagger.model", "--seed", 5,
                   "--out", workdir / "negatives.jsonl") == 0
    assert run_cli("make-dataset", "--jokes", workdir / "jokes/documents.jsonl",
                   "--nonjokes", workdir / "negatives.jsonl", "--task", "single",
                   "--seed", 5, "--out", workdir / "data-dt") == 0
    assert run_cli("make-dataset", "--jokes", workdir / "jokes/documents.jsonl",
                   "--nonjokes", workdir / "news/documents.jsonl", "--task", "single",
                   "--seed", 5, "--out", workdir / "data-news") == 0
    assert run_cli("make-dataset", "--jokes", workdir / "jokes/documents.jsonl",
                   "--nonjokes", workdir / "negatives.jsonl", "--task", "pairwise",
                   "--seed", 5, "--out", workdir / "data-pair") == 0
    return workdir


class TestPipeline:
    def test_ingest_artifacts(self, pipeline):
        manifest = json.loads((pipeline / "jokes/manifest.json").read_text())
        assert manifest["count"] == 120
        config = json.loads((pipeline / "jokes/run_config.json").read_text())
        assert config["command"] == "ingest"
        assert config["params"]["source"] == "jokes"

    def test_negatives_manifest_reports_degenerates(self, pipeline):
        manifest = json.loads(
            (pipeline / "negatives.jsonl.manifest.json").read_text()
        )
        assert manifest["count"] == 120
        assert 0 <= manifest["degenerate_fraction"] < 1
        assert manifest["params"]["max_freq_percentile"] == 0.62
        assert manifest["params"]["chars_per_replacement"] == 25
        assert manifest["params"]["context_sample_size"] == 3

    def test_tag_command(self, pipeline):
        out = pipeline / "tagged.jsonl"
        assert run_cli("tag", "--model", pipeline / "tagger.model",
                       "--in", pipeline / "jokes/documents.jsonl", "--out", out) == 0
        first = json.loads(out.read_text().splitlines()[0])
        assert first["id"] == "jokes:1"
        assert all(len(pair) == 2 for pair in first["tags"])

    def test_train_nb_and_eval(self, pipeline, capsys):
        assert run_cli("train", "--model", "nb", "--data", pipeline / "data-dt",
                       "--out", pipeline / "run-nb") == 0
        assert (pipeline / "run-nb/model.nb").exists()
        capsys.readouterr()
        assert run_cli("eval", "--model-dir", pipeline / "run-nb",
                       "--data", pipeline / "data-dt", "--split", "test",
                       "--out", pipeline / "run-nb/eval-test.json") == 0
        report = json.loads(capsys.readouterr().out)
        assert 0.0 <= report["accuracy"] <= 1.0
        assert report["n"] == len((pipeline / "data-dt/test.jsonl")
                                  .read_text().splitlines())

    def test_train_cnn_single(self, pipeline):
        assert run_cli("train", "--model", "cnn", "--data", pipeline / "data-news",
                       "--embeddings", pipeline / "embeddings.vec",
                       "--epochs", 2, "--max-seq-len", 24,
                       "--out", pipeline / "run-cnn") == 0
        metrics = json.loads((pipeline / "run-cnn/metrics.json").read_text())
        assert len(metrics["history"]) == 2
        assert "truncation_counts" in metrics

    def test_train_lstm_pairwise(self, pipeline):
        assert run_cli("train", "--model", "lstm", "--data", pipeline / "data-pair",
                       "--embeddings", pipeline / "embeddings.vec",
                       "--epochs", 2, "--hidden-dim", 8, "--max-seq-len", 24,
                       "--out", pipeline / "run-pair") == 0
        assert (pipeline / "run-pair/model.nn").exists()

    def test_eval_pairwise(self, pipeline, capsys):
        assert run_cli("eval", "--model-dir", pipeline / "run-pair",
                       "--data", pipeline / "data-pair", "--split", "test") == 0
        report = json.loads(capsys.readouterr().out)
        assert report["positive_label"] == "a"

    def test_search_artifacts(self, pipeline):
        assert run_cli("search", "--model", "lstm", "--data", pipeline / "data-dt",
                       "--embeddings", pipeline / "embeddings.vec",
                       "--trials", 2, "--epochs", 2, "--max-seq-len", 24,
                       "--out", pipeline / "run-search") == 0
        trials = [json.loads(line) for line in
                  (pipeline / "run-search/trials.jsonl").read_text().splitlines()]
        assert len(trials) == 2
        assert sum(t["selected"] for t in trials) == 1
        curve = (pipeline / "run-search/curve.csv").read_text().splitlines()
        assert curve[0] == "n,expected_max"
        assert len(curve) == 3
        assert (pipeline / "run-search/model.nn").exists()

    def test_cross_domain(self, pipeline, capsys):
        assert run_cli("cross-domain", "--model-dir", pipeline / "run-nb",
                       "--corpus", pipeline / "news/documents.jsonl") == 0
        report = json.loads(capsys.readouterr().out)
        assert 0.0 <= report["predicted_joke_rate"] <= 1.0
        assert report["n"] == 120

    def test_score_external(self, pipeline, capsys):
        golds = [json.loads(line) for line in
                 (pipeline / "data-dt/test.jsonl").read_text().splitlines()]
        preds_path = pipeline / "external.jsonl"
        preds_path.write_text(
            "".join(json.dumps({"id": g["id"], "pred": g["label"], "score": 1.0}) + "\n"
                    for g in golds),
            encoding="utf-8",
        )
        assert run_cli("score-external", "--preds", preds_path,
                       "--data", pipeline / "data-dt", "--split", "test") == 0
        report = json.loads(capsys.readouterr().out)
        assert report["accuracy"] == 1.0


class TestExitCodes:
    def test_usage_error_unknown_flag(self, workdir, capsys):
        assert run_cli("ingest", "--bogus", "x") == 1
        capsys.readouterr()

    def test_data_error_missing_file(self, workdir, capsys):
        assert run_cli("ingest", "--in", workdir / "nope.txt", "--source", "x",
                       "--out", workdir / "never") == 2
        assert "data error" in capsys.readouterr().err

    def test_nb_pairwise_is_usage_error(self, pipeline, capsys):
        assert run_cli("train", "--model", "nb", "--data", pipeline / "data-pair",
                       "--out", pipeline / "never") == 1
        capsys.readouterr()

    def test_eval_without_model_is_data_error(self, pipeline, capsys):
        assert run_cli("eval", "--model-dir", pipeline / "data-dt",
                       "--data", pipeline / "data-dt") == 2
        capsys.readouterr()

    def test_score_external_missing_ids(self, pipeline, capsys):
        path = pipeline / "bad-preds.jsonl"
        path.write_text('{"id": "dyntemplate:jokes:1", "pred": "joke", "score": 1}\n',
                        encoding="utf-8")
        assert run_cli("score-external", "--preds", path,
                       "--data", pipeline / "data-dt", "--split", "test") == 2
        capsys.readouterr()


def test_env_var_flags(workdir, monkeypatch, capsys):
    monkeypatch.setenv("MIRTH_INGEST_SOURCE", "envsource")
    out = workdir / "env-ingest"
    assert run_cli("ingest", "--in", workdir / "jokes.txt", "--out", out) == 0
    capsys.readouterr()
    first = json.loads((out / "documents.jsonl").read_text().splitlines()[0])
    assert first["id"].startswith("envsource:")


def _digest_tree(root: Path) -> dict[str, str]:
    out = {}
    for path in sorted(root.rglob("*")):
        if path.is_file():
            out[str(path.relative_to(root))] = hashlib.sha256(
                path.read_bytes()
            ).hexdigest()
    return out


def test_pipeline_determinism(tmp_path, capsys):
    """The same RunConfig executed twice produces byte-identical artifacts."""
    synthdata.write_lines(tmp_path / "jokes.txt", synthdata.make_jokes(80, seed=41))
    (tmp_path / "tagged.conllu").write_text(synthdata.make_conllu(200, seed=42),
                                            encoding="utf-8")
    synthdata.write_embeddings(tmp_path / "embeddings.vec", dim=12, seed=43)
    art = tmp_path / "artifacts"

    def run_once():
        assert run_cli("ingest", "--in", tmp_path / "jokes.txt", "--source", "jokes",
                       "--out", art / "jokes") == 0
        assert run_cli("train-tagger", "--conllu", tmp_path / "tagged.conllu",
                       "--out", art / "tagger.model") == 0
        assert run_cli("generate-negatives", "--jokes", art / "jokes/documents.jsonl",
                       "--tagger", art / "tagger.model", "--seed", 3,
                       "--out", art / "negatives.jsonl") == 0
        assert run_cli("make-dataset", "--jokes", art / "jokes/documents.jsonl",
                       "--nonjokes", art / "negatives.jsonl", "--task", "single",
                       "--seed", 3, "--out", art / "data") == 0
        assert run_cli("train", "--model", "cnn", "--data", art / "data",
                       "--embeddings", tmp_path / "embeddings.vec",
                       "--epochs", 2, "--max-seq-len", 24,
                       "--out", art / "run") == 0
        assert run_cli("eval", "--model-dir", art / "run", "--data", art / "data",
                       "--split", "test", "--out", art / "run/eval-test.json") == 0
        capsys.readouterr()
        return _digest_tree(art)

    first = run_once()
    second = run_once()
    assert first == second
