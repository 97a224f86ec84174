"""Fine-tune a pretrained sequence-classification transformer on the
exported benchmark datasets.

Single task: one text per example.  Pairwise task: both texts go through
the tokenizer's sentence-pair path, so they share one input window joined
by the model's separator token; truncation counts are logged because that
shared window is where pairwise accuracy is known to suffer.

The best per-epoch checkpoint on validation accuracy is kept (and the
choice logged); test predictions are written in the external-predictor
protocol: {"id", "pred", "score"} per line, score being the probability
of the positive class (joke / side a).
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import torch
from torch.utils.data import DataLoader, TensorDataset

from .config import AdapterConfig
from .data import Dataset, Example, write_predictions

__all__ = ["finetune", "load_model_and_tokenizer", "encode_split"]

logger = logging.getLogger(__name__)


def load_model_and_tokenizer(config: AdapterConfig):
    from transformers import AutoModelForSequenceClassification, AutoTokenizer

    if not config.model_name_or_path:
        raise SystemExit(
            "no pretrained model configured: set model_name_or_path to a local "
            "checkpoint directory or hub identifier of a Dutch language model"
        )
    try:
        tokenizer = AutoTokenizer.from_pretrained(config.model_name_or_path)
        model = AutoModelForSequenceClassification.from_pretrained(
            config.model_name_or_path, num_labels=2
        )
    except (OSError, ValueError) as exc:
        raise SystemExit(
            f"cannot load pretrained weights {config.model_name_or_path!r}: {exc}. "
            "Download a checkpoint (e.g. a RobBERT release) and point "
            "model_name_or_path at it."
        ) from exc
    return model, tokenizer


def encode_split(tokenizer, examples: list[Example], task: str, max_length: int):
    """Tokenize one split; returns (encodings, truncation count)."""
    if task == "pairwise":
        args = ([e.text_a for e in examples], [e.text_b for e in examples])
    else:
        args = ([e.text for e in examples],)
    free = tokenizer(*args, truncation=False, padding=False)
    truncated = sum(1 for ids in free["input_ids"] if len(ids) > max_length)
    enc = tokenizer(*args, truncation=True, padding="max_length",
                    max_length=max_length, return_tensors="pt")
    return enc, truncated


def _label_ids(examples: list[Example], labels) -> torch.Tensor:
    index = {label: i for i, label in enumerate(labels)}
    return torch.tensor([index[e.label] for e in examples], dtype=torch.long)


def _keys(enc) -> list[str]:
    return [k for k in ("input_ids", "attention_mask", "token_type_ids") if k in enc]


@torch.no_grad()
def _eval_accuracy(model, enc, y, keys, batch_size, device) -> float:
    model.eval()
    correct = 0
    for start in range(0, len(y), batch_size):
        batch = {k: enc[k][start : start + batch_size].to(device) for k in keys}
        logits = model(**batch).logits
        correct += int((logits.argmax(dim=-1).cpu() == y[start : start + batch_size]).sum())
    return correct / len(y)


def finetune(dataset: Dataset, config: AdapterConfig, out_dir: str | Path,
             device: str | None = None) -> dict:
    """Train, select the best epoch on validation, predict the test split.

    Writes predictions.jsonl and metrics.json into ``out_dir``; returns the
    metrics dict.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    device = device or ("cuda" if torch.cuda.is_available() else "cpu")
    torch.manual_seed(config.seed)

    model, tokenizer = load_model_and_tokenizer(config)
    model.to(device)

    enc_train, trunc_train = encode_split(tokenizer, dataset.train, dataset.task,
                                          config.max_length)
    enc_valid, trunc_valid = encode_split(tokenizer, dataset.validation, dataset.task,
                                          config.max_length)
    enc_test, trunc_test = encode_split(tokenizer, dataset.test, dataset.task,
                                        config.max_length)
    truncation = {"train": trunc_train, "validation": trunc_valid, "test": trunc_test}
    if any(truncation.values()):
        logger.info("truncated inputs per split: %s", truncation)

    keys = _keys(enc_train)
    y_train = _label_ids(dataset.train, dataset.labels)
    y_valid = _label_ids(dataset.validation, dataset.labels)

    loader = DataLoader(
        TensorDataset(*[enc_train[k] for k in keys], y_train),
        batch_size=config.per_device_train_batch_size,
        shuffle=True,
        generator=torch.Generator().manual_seed(config.seed),
    )
    optimizer = torch.optim.AdamW(
        model.parameters(), lr=config.learning_rate, eps=config.adam_epsilon,
        weight_decay=config.weight_decay,
    )

    best = {"epoch": 0, "val_accuracy": -1.0, "state": None}
    history = []
    for epoch in range(1, config.num_train_epochs + 1):
        model.train()
        epoch_loss, steps = 0.0, 0
        optimizer.zero_grad()
        for i, batch in enumerate(loader):
            inputs = {k: t.to(device) for k, t in zip(keys, batch[:-1])}
            labels = batch[-1].to(device)
            out = model(**inputs, labels=labels)
            loss = out.loss / config.gradient_accumulation_steps
            loss.backward()
            epoch_loss += float(out.loss.detach())
            steps += 1
            if (i + 1) % config.gradient_accumulation_steps == 0:
                torch.nn.utils.clip_grad_norm_(model.parameters(), config.max_grad_norm)
                optimizer.step()
                optimizer.zero_grad()
        if steps % config.gradient_accumulation_steps:
            torch.nn.utils.clip_grad_norm_(model.parameters(), config.max_grad_norm)
            optimizer.step()
            optimizer.zero_grad()

        val_acc = _eval_accuracy(model, enc_valid, y_valid, keys,
                                 config.per_device_eval_batch_size, device)
        history.append({"epoch": epoch, "train_loss": epoch_loss / max(1, steps),
                        "val_accuracy": val_acc})
        if val_acc > best["val_accuracy"]:
            best = {"epoch": epoch, "val_accuracy": val_acc,
                    "state": {k: v.detach().cpu().clone()
                              for k, v in model.state_dict().items()}}

    if best["state"] is not None:
        model.load_state_dict(best["state"])
    logger.info("selected epoch %d (validation accuracy %.4f)",
                best["epoch"], best["val_accuracy"])

    # Test predictions in the external-predictor protocol.  The reported
    # score is the probability of the positive class: "joke" (label index 1)
    # for the single task, side "a" (index 0) for the pairwise task.
    model.eval()
    rows = []
    positive = 1 if dataset.task == "single" else 0
    with torch.no_grad():
        bs = config.per_device_eval_batch_size
        for start in range(0, len(dataset.test), bs):
            batch = {k: enc_test[k][start : start + bs].to(device) for k in keys}
            probs = torch.softmax(model(**batch).logits, dim=-1).cpu()
            for example, p in zip(dataset.test[start : start + bs], probs):
                pred = dataset.labels[int(p.argmax())]
                rows.append({"id": example.id, "pred": pred,
                             "score": round(float(p[positive]), 6)})
    write_predictions(out_dir / "predictions.jsonl", rows)

    metrics = {
        "task": dataset.task,
        "best_epoch": best["epoch"],
        "validation_accuracy": best["val_accuracy"],
        "history": history,
        "truncation_counts": truncation,
        "n_test": len(dataset.test),
    }
    with open(out_dir / "metrics.json", "w", encoding="utf-8") as fh:
        json.dump(metrics, fh, ensure_ascii=False, sort_keys=True, indent=2)
        fh.write("\n")
    with open(out_dir / "run_config.txt", "w", encoding="utf-8") as fh:
        fh.write(config.to_lines())
    return metrics
