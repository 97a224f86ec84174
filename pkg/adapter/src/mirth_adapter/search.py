"""Random hyperparameter search over the transformer's benchmark space:
learning rate log-uniform over [1e-6, 1e-4], gradient accumulation from
{1, 2, 3, 4}, weight decay uniform over [0, 0.1].  Trial records use the
same JSONL schema as the main harness, so its expected-max machinery can
consume them directly.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import random
from pathlib import Path

from .config import (
    GRAD_ACCUM_CHOICES,
    LEARNING_RATE_RANGE,
    WEIGHT_DECAY_RANGE,
    AdapterConfig,
)
from .data import Dataset
from .finetune import finetune

__all__ = ["sample_hyperparameters", "random_search_adapter"]


def _trial_rng(base_seed: int, trial: int) -> random.Random:
    digest = hashlib.sha256(f"{base_seed}\x1f{trial}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def sample_hyperparameters(rng: random.Random) -> dict:
    lo, hi = LEARNING_RATE_RANGE
    lr = 10 ** rng.uniform(math.log10(lo), math.log10(hi))
    return {
        "learning_rate": lr,
        "gradient_accumulation_steps": rng.choice(GRAD_ACCUM_CHOICES),
        "weight_decay": rng.uniform(*WEIGHT_DECAY_RANGE),
    }


def random_search_adapter(dataset: Dataset, config: AdapterConfig,
                          out_dir: str | Path, n_trials: int = 10,
                          base_seed: int = 1, device: str | None = None) -> list[dict]:
    """Run trials, keep the best on validation accuracy, write trials.jsonl.

    The selected trial's test predictions end up at ``out_dir/predictions.jsonl``.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = []
    best: tuple[float, int] | None = None
    for trial in range(n_trials):
        hp = sample_hyperparameters(_trial_rng(base_seed, trial))
        trial_config = dataclasses.replace(config, **hp)
        trial_dir = out_dir / f"trial-{trial:02d}"
        try:
            metrics = finetune(dataset, trial_config, trial_dir, device=device)
        except SystemExit:
            raise
        except RuntimeError as exc:
            records.append({"trial": trial, "hyperparameters": hp,
                            "validation_accuracy": None, "status": "failed",
                            "test": None, "selected": False, "error": str(exc)})
            continue
        records.append({"trial": trial, "hyperparameters": hp,
                        "validation_accuracy": metrics["validation_accuracy"],
                        "status": "ok", "test": None, "selected": False})
        if best is None or metrics["validation_accuracy"] > best[0]:
            best = (metrics["validation_accuracy"], trial)

    if best is not None:
        _, best_trial = best
        records[best_trial]["selected"] = True
        best_dir = out_dir / f"trial-{best_trial:02d}"
        (out_dir / "predictions.jsonl").write_bytes(
            (best_dir / "predictions.jsonl").read_bytes()
        )
        records[best_trial]["test"] = {"predictions": "predictions.jsonl"}

    with open(out_dir / "trials.jsonl", "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
    return records
