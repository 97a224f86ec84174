"""Full-scale adapter acceptance.

These thresholds assume genuine pretrained Dutch weights and a real joke
corpus; neither ships with this repository (and this sandbox has no model
hub access), so the tests are gated behind environment variables:

    MIRTH_ADAPTER_MODEL      path or hub id of a pretrained Dutch model
    MIRTH_ADAPTER_DATA_DT    exported jokes-vs-dyntemplate dataset dir
    MIRTH_ADAPTER_DATA_NEWS  exported jokes-vs-news dataset dir
    MIRTH_ADAPTER_DATA_PAIR  exported pairwise dataset dir
    MIRTH_ADAPTER_NEWS_CORPUS  documents JSONL of news items (cross-domain)

Unset variables skip the corresponding test with a clear reason.  The
protocol itself is fully exercised offline by the other test modules.
"""

import json
import os

import pytest

from mirth_adapter.config import AdapterConfig
from mirth_adapter.data import load_dataset
from mirth_adapter.finetune import finetune

MODEL = os.environ.get("MIRTH_ADAPTER_MODEL")

requires_model = pytest.mark.skipif(
    MODEL is None,
    reason="set MIRTH_ADAPTER_MODEL to a pretrained Dutch checkpoint to run "
           "the full-scale adapter acceptance",
)


def _dataset_or_skip(var: str):
    path = os.environ.get(var)
    if path is None:
        pytest.skip(f"set {var} to an exported dataset directory")
    return load_dataset(path)


def _accuracy(out_dir, dataset):
    preds = {}
    with open(out_dir / "predictions.jsonl", encoding="utf-8") as fh:
        for line in fh:
            obj = json.loads(line)
            preds[obj["id"]] = obj["pred"]
    return sum(preds[e.id] == e.label for e in dataset.test) / len(dataset.test)


@requires_model
def test_single_dyntemplate_accuracy(tmp_path):
    dataset = _dataset_or_skip("MIRTH_ADAPTER_DATA_DT")
    config = AdapterConfig(model_name_or_path=MODEL, learning_rate=2e-5)
    finetune(dataset, config, tmp_path / "run")
    assert _accuracy(tmp_path / "run", dataset) >= 0.80


@requires_model
def test_single_news_accuracy(tmp_path):
    dataset = _dataset_or_skip("MIRTH_ADAPTER_DATA_NEWS")
    config = AdapterConfig(model_name_or_path=MODEL, learning_rate=2e-5)
    finetune(dataset, config, tmp_path / "run")
    assert _accuracy(tmp_path / "run", dataset) >= 0.95


@requires_model
def test_pairwise_accuracy(tmp_path):
    dataset = _dataset_or_skip("MIRTH_ADAPTER_DATA_PAIR")
    config = AdapterConfig(model_name_or_path=MODEL, learning_rate=2e-5)
    finetune(dataset, config, tmp_path / "run")
    assert _accuracy(tmp_path / "run", dataset) >= 0.75


@requires_model
def test_cross_domain_direction(tmp_path):
    """A dyntemplate-trained detector should call most news items jokes."""
    import torch

    dataset = _dataset_or_skip("MIRTH_ADAPTER_DATA_DT")
    corpus_path = os.environ.get("MIRTH_ADAPTER_NEWS_CORPUS")
    if corpus_path is None:
        pytest.skip("set MIRTH_ADAPTER_NEWS_CORPUS to a documents JSONL file")
    config = AdapterConfig(model_name_or_path=MODEL, learning_rate=2e-5)
    finetune(dataset, config, tmp_path / "run")

    from mirth_adapter.finetune import load_model_and_tokenizer

    model, tokenizer = load_model_and_tokenizer(config)
    texts = [json.loads(line)["text"]
             for line in open(corpus_path, encoding="utf-8") if line.strip()]
    joke_rate = 0
    with torch.no_grad():
        for start in range(0, len(texts), 32):
            enc = tokenizer(texts[start : start + 32], truncation=True,
                            padding=True, max_length=config.max_length,
                            return_tensors="pt")
            joke_rate += int((model(**enc).logits.argmax(dim=-1) == 1).sum())
    assert joke_rate / len(texts) > 0.60
