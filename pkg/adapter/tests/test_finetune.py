import json

import pytest
import torch

from mirth_adapter.config import AdapterConfig, load_config
from mirth_adapter.data import load_dataset
from mirth_adapter.finetune import encode_split, finetune, load_model_and_tokenizer


@pytest.fixture(autouse=True)
def _single_thread():
    old = torch.get_num_threads()
    torch.set_num_threads(1)
    yield
    torch.set_num_threads(old)


def _read_preds(path):
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]


class TestFinetuneSingle:
    def test_end_to_end_artifacts(self, single_dataset_dir, config_file, tmp_path):
        ds = load_dataset(single_dataset_dir)
        config = load_config(config_file)
        out = tmp_path / "run"
        metrics = finetune(ds, config, out, device="cpu")

        preds = _read_preds(out / "predictions.jsonl")
        assert {p["id"] for p in preds} == {e.id for e in ds.test}
        assert all(p["pred"] in ("joke", "nonjoke") for p in preds)
        assert all(0.0 <= p["score"] <= 1.0 for p in preds)
        assert metrics["best_epoch"] in (1, 2)
        assert len(metrics["history"]) == 2
        assert set(metrics["truncation_counts"]) == {"train", "validation", "test"}
        assert (out / "run_config.txt").read_text().startswith("model_name_or_path")

    def test_deterministic_predictions(self, single_dataset_dir, config_file, tmp_path):
        ds = load_dataset(single_dataset_dir)
        config = load_config(config_file)
        finetune(ds, config, tmp_path / "a", device="cpu")
        finetune(ds, config, tmp_path / "b", device="cpu")
        assert (tmp_path / "a/predictions.jsonl").read_bytes() == \
               (tmp_path / "b/predictions.jsonl").read_bytes()

    def test_learns_separable_data(self, single_dataset_dir, config_file, tmp_path):
        ds = load_dataset(single_dataset_dir)
        config = load_config(config_file, num_train_epochs=30, learning_rate=1e-4)
        finetune(ds, config, tmp_path / "run", device="cpu")
        preds = {p["id"]: p["pred"] for p in _read_preds(tmp_path / "run/predictions.jsonl")}
        accuracy = sum(preds[e.id] == e.label for e in ds.test) / len(ds.test)
        assert accuracy >= 0.75

    def test_truncation_counted(self, single_dataset_dir, config_file, tmp_path):
        ds = load_dataset(single_dataset_dir)
        config = load_config(config_file, max_length=8, num_train_epochs=1)
        metrics = finetune(ds, config, tmp_path / "run", device="cpu")
        assert metrics["truncation_counts"]["train"] > 0


class TestFinetunePairwise:
    def test_end_to_end(self, pairwise_dataset_dir, config_file, tmp_path):
        ds = load_dataset(pairwise_dataset_dir)
        config = load_config(config_file, num_train_epochs=1)
        finetune(ds, config, tmp_path / "run", device="cpu")
        preds = _read_preds(tmp_path / "run/predictions.jsonl")
        assert {p["id"] for p in preds} == {e.id for e in ds.test}
        assert all(p["pred"] in ("a", "b") for p in preds)

    def test_separator_token_protocol(self, pairwise_dataset_dir, config_file):
        # Both texts share one input window, joined by the separator token.
        ds = load_dataset(pairwise_dataset_dir)
        config = load_config(config_file)
        _, tokenizer = load_model_and_tokenizer(config)
        enc, _ = encode_split(tokenizer, ds.test[:1], "pairwise", config.max_length)
        ids = enc["input_ids"][0].tolist()
        sep = tokenizer.sep_token_id
        interior = ids[1:]  # skip the leading CLS/BOS
        assert interior.count(sep) >= 2, "pair must be joined by separator tokens"
        first_sep = interior.index(sep) + 1
        rest = ids[first_sep + 1 :]
        assert any(t not in (tokenizer.pad_token_id, sep) for t in rest), \
            "second text must follow the separator"


def test_missing_pretrained_weights_message(single_dataset_dir, tmp_path):
    config = AdapterConfig(model_name_or_path=str(tmp_path / "does-not-exist"))
    ds = load_dataset(single_dataset_dir)
    with pytest.raises(SystemExit, match="cannot load pretrained weights"):
        finetune(ds, config, tmp_path / "run", device="cpu")


def test_unconfigured_model_message(single_dataset_dir, tmp_path):
    config = AdapterConfig()
    ds = load_dataset(single_dataset_dir)
    with pytest.raises(SystemExit, match="no pretrained model configured"):
        finetune(ds, config, tmp_path / "run", device="cpu")
