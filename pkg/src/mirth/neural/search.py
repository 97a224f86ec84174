"""Random hyperparameter search over the benchmark space.

Learning rate is sampled log-uniformly over [1e-3, 1e-1]; the LSTM hidden
dimension uniformly from {8, 16, 32, 64, 128}.  Each trial draws from its
own seeded stream, trains, and records its validation accuracy; only the
trial with the best validation accuracy is evaluated on the test split.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ..datasets import DatasetSplit, LabeledExample, PairExample
from ..errors import DataError, TrainingDiverged
from ..evaluation import evaluate
from .embeddings import EmbeddingMatrix
from .models import LSTM_HIDDEN_DIMS, NeuralTextClassifier, PairwiseNeuralClassifier

__all__ = [
    "SearchSpace",
    "TrialRecord",
    "sample_hyperparameters",
    "random_search",
    "write_trials",
    "read_trials",
]


@dataclass(frozen=True)
class SearchSpace:
    learning_rate_range: tuple[float, float] = (1e-3, 1e-1)
    hidden_dims: tuple[int, ...] = LSTM_HIDDEN_DIMS

    def __post_init__(self):
        lo, hi = self.learning_rate_range
        if not (0 < lo <= hi):
            raise ValueError(f"bad learning-rate range {self.learning_rate_range}")


@dataclass
class TrialRecord:
    trial: int
    hyperparameters: dict
    validation_accuracy: float | None
    status: str  # "ok" | "failed"
    test: dict | None = None
    selected: bool = False

    def to_obj(self) -> dict:
        return {
            "trial": self.trial,
            "hyperparameters": self.hyperparameters,
            "validation_accuracy": self.validation_accuracy,
            "status": self.status,
            "test": self.test,
            "selected": self.selected,
        }


def sample_hyperparameters(encoder: str, space: SearchSpace, rng: np.random.Generator) -> dict:
    lo, hi = space.learning_rate_range
    hp = {"learning_rate": float(10 ** rng.uniform(math.log10(lo), math.log10(hi)))}
    if encoder == "lstm":
        hp["hidden_dim"] = int(space.hidden_dims[rng.integers(len(space.hidden_dims))])
    return hp


def _task_arrays(split: DatasetSplit, name: str):
    examples = split.split(name)
    if not examples:
        raise DataError(f"split {name!r} is empty")
    if isinstance(examples[0], LabeledExample):
        return [e.text for e in examples], [e.label for e in examples], examples
    if isinstance(examples[0], PairExample):
        return (
            [(e.text_a, e.text_b) for e in examples],
            [e.target for e in examples],
            examples,
        )
    raise TypeError(f"cannot train on {type(examples[0]).__name__}")


def random_search(
    encoder: str,
    split: DatasetSplit,
    embeddings: EmbeddingMatrix,
    *,
    n_trials: int = 10,
    base_seed: int = 1,
    space: SearchSpace = SearchSpace(),
    evaluate_test: bool = True,
    **classifier_kwargs,
):
    """Run the search; returns (trial records, best fitted classifier).

    The classifier family follows the dataset manifest: pairwise datasets
    train the dual-encoder model.  Extra keyword arguments are forwarded to
    the classifier constructor (e.g. epochs for quick runs).
    """
    task = split.manifest.get("task", "single")
    cls = PairwiseNeuralClassifier if task == "pairwise" else NeuralTextClassifier
    x_train, y_train, _ = _task_arrays(split, "train")
    x_valid, y_valid, _ = _task_arrays(split, "validation")

    records: list[TrialRecord] = []
    best: tuple[float, int] | None = None
    best_model = None
    for trial in range(n_trials):
        rng = np.random.default_rng([base_seed, trial])
        hp = sample_hyperparameters(encoder, space, rng)
        model = cls(encoder=encoder, embeddings=embeddings, **hp, **classifier_kwargs)
        try:
            model.fit(x_train, y_train, validation_data=(x_valid, y_valid))
        except TrainingDiverged:
            records.append(
                TrialRecord(trial=trial, hyperparameters=hp,
                            validation_accuracy=None, status="failed")
            )
            continue
        val_acc = model.best_val_accuracy_
        records.append(
            TrialRecord(trial=trial, hyperparameters=hp,
                        validation_accuracy=val_acc, status="ok")
        )
        if best is None or val_acc > best[0]:
            best = (val_acc, trial)
            best_model = model

    if best is not None:
        _, best_trial = best
        records[best_trial].selected = True
        if evaluate_test:
            x_test, _, gold = _task_arrays(split, "test")
            preds = {g.id: p for g, p in zip(gold, best_model.predict(x_test))}
            records[best_trial].test = evaluate(preds, gold).to_dict()
    return records, best_model


def write_trials(path: str | Path, records: Sequence[TrialRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_obj(), ensure_ascii=False, sort_keys=True))
            fh.write("\n")


def read_trials(path: str | Path) -> list[TrialRecord]:
    path = Path(path)
    out: list[TrialRecord] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                out.append(
                    TrialRecord(
                        trial=int(obj["trial"]),
                        hyperparameters=dict(obj["hyperparameters"]),
                        validation_accuracy=obj.get("validation_accuracy"),
                        status=obj.get("status", "ok"),
                        test=obj.get("test"),
                        selected=bool(obj.get("selected", False)),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise DataError(f"{path}:{lineno}: bad trial record: {exc}") from exc
    return out
