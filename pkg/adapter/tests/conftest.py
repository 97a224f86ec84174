from __future__ import annotations

import json
import os
import random

import pytest
import torch

os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TRANSFORMERS_OFFLINE", "1")

JOKE_WORDS = ["haha", "hihi", "grap", "mop", "lachen", "gek", "kwak", "snater"]
NEWS_WORDS = ["saai", "nieuws", "bericht", "belasting", "rente", "rapport",
              "vergadering", "kwartaal"]
GLUE = ["de", "het", "een", "over", "met", "van"]


def _text(rng, words, n=9):
    return " ".join(rng.choice(words if i % 2 else GLUE) for i in range(n))


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory):
    """A tiny randomly initialized sequence classifier saved locally.

    Stands in for a real pretrained checkpoint so the full fine-tuning and
    prediction protocol can run offline.
    """
    from tokenizers import Tokenizer, models, pre_tokenizers
    from tokenizers.processors import TemplateProcessing
    from transformers import (
        PreTrainedTokenizerFast,
        RobertaConfig,
        RobertaForSequenceClassification,
    )

    specials = ["<s>", "<pad>", "</s>", "<unk>"]
    vocab = {w: i for i, w in enumerate(specials + GLUE + JOKE_WORDS + NEWS_WORDS)}
    tok = Tokenizer(models.WordLevel(vocab, unk_token="<unk>"))
    tok.pre_tokenizer = pre_tokenizers.Whitespace()
    tok.post_processor = TemplateProcessing(
        single="<s> $A </s>",
        pair="<s> $A </s> </s> $B:1 </s>:1",
        special_tokens=[("<s>", vocab["<s>"]), ("</s>", vocab["</s>"])],
    )
    fast = PreTrainedTokenizerFast(
        tokenizer_object=tok, unk_token="<unk>", pad_token="<pad>",
        bos_token="<s>", eos_token="</s>", cls_token="<s>", sep_token="</s>",
    )
    config = RobertaConfig(
        vocab_size=len(vocab), hidden_size=32, num_hidden_layers=2,
        num_attention_heads=2, intermediate_size=64, max_position_embeddings=130,
        pad_token_id=vocab["<pad>"], bos_token_id=vocab["<s>"],
        eos_token_id=vocab["</s>"], type_vocab_size=1,
    )
    torch.manual_seed(7)
    model = RobertaForSequenceClassification(config)
    out = tmp_path_factory.mktemp("tiny-model")
    model.save_pretrained(out)
    fast.save_pretrained(out)
    return out


def _write_split(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


@pytest.fixture(scope="session")
def single_dataset_dir(tmp_path_factory):
    rng = random.Random(3)
    root = tmp_path_factory.mktemp("data-single")

    def rows(n, offset):
        out = []
        for i in range(n):
            joke = i % 2 == 0
            out.append({
                "id": f"t:{offset + i}",
                "text": _text(rng, JOKE_WORDS if joke else NEWS_WORDS),
                "label": "joke" if joke else "nonjoke",
                "source": "jokes" if joke else "news",
            })
        return out

    _write_split(root / "train.jsonl", rows(48, 0))
    _write_split(root / "valid.jsonl", rows(16, 100))
    _write_split(root / "test.jsonl", rows(16, 200))
    (root / "manifest.json").write_text(
        json.dumps({"task": "single", "seed": 3, "ratios": [0.6, 0.2, 0.2]}),
        encoding="utf-8",
    )
    return root


@pytest.fixture(scope="session")
def pairwise_dataset_dir(tmp_path_factory):
    rng = random.Random(4)
    root = tmp_path_factory.mktemp("data-pair")

    def rows(n, offset):
        out = []
        for i in range(n):
            joke, other = _text(rng, JOKE_WORDS), _text(rng, NEWS_WORDS)
            side_a = i % 2 == 0
            out.append({
                "id": f"p:{offset + i}",
                "text_a": joke if side_a else other,
                "text_b": other if side_a else joke,
                "target": "a" if side_a else "b",
            })
        return out

    _write_split(root / "train.jsonl", rows(40, 0))
    _write_split(root / "valid.jsonl", rows(12, 100))
    _write_split(root / "test.jsonl", rows(12, 200))
    (root / "manifest.json").write_text(
        json.dumps({"task": "pairwise", "seed": 4, "ratios": [0.6, 0.2, 0.2]}),
        encoding="utf-8",
    )
    return root


@pytest.fixture()
def config_file(tmp_path, tiny_model_dir):
    path = tmp_path / "adapter.cfg"
    path.write_text(
        "\n".join([
            f"model_name_or_path = {tiny_model_dir}",
            "learning_rate = 5e-5",
            "num_train_epochs = 2",
            "per_device_train_batch_size = 8",
            "per_device_eval_batch_size = 8",
            "gradient_accumulation_steps = 1",
            "weight_decay = 0.01",
            "warmup_steps = 0",
            "adam_epsilon = 1e-8  # fixed by the recipe",
            "seed = 1",
            "max_grad_norm = 1.0",
            "fp16 = false",
            "max_length = 24",
        ]) + "\n",
        encoding="utf-8",
    )
    return path
