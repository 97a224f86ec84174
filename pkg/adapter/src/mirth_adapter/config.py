"""Fine-tuning configuration, read from a flat key=value file.

Keys mirror the benchmark's hyperparameter table for the transformer:
adam_epsilon, fp16, gradient_accumulation_steps, learning_rate,
max_grad_norm, num_train_epochs, per_device_train_batch_size,
per_device_eval_batch_size, seed, warmup_steps, weight_decay, plus
model_name_or_path and max_length.  The searched fields are validated
against their benchmark ranges.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

__all__ = ["AdapterConfig", "load_config"]

_BOOL = {"true": True, "false": False, "1": True, "0": False}

LEARNING_RATE_RANGE = (1e-6, 1e-4)
GRAD_ACCUM_CHOICES = (1, 2, 3, 4)
WEIGHT_DECAY_RANGE = (0.0, 0.1)


@dataclass
class AdapterConfig:
    model_name_or_path: str = ""
    learning_rate: float = 1e-5
    num_train_epochs: int = 3
    per_device_train_batch_size: int = 8
    per_device_eval_batch_size: int = 8
    gradient_accumulation_steps: int = 1
    weight_decay: float = 0.0
    warmup_steps: int = 0
    adam_epsilon: float = 1e-8
    seed: int = 1
    max_grad_norm: float = 1.0
    fp16: bool = False
    max_length: int = 128

    def __post_init__(self):
        lo, hi = LEARNING_RATE_RANGE
        if not lo <= self.learning_rate <= hi:
            raise ValueError(
                f"learning_rate {self.learning_rate} outside [{lo}, {hi}]"
            )
        if self.gradient_accumulation_steps not in GRAD_ACCUM_CHOICES:
            raise ValueError(
                f"gradient_accumulation_steps must be one of {GRAD_ACCUM_CHOICES}"
            )
        lo, hi = WEIGHT_DECAY_RANGE
        if not lo <= self.weight_decay <= hi:
            raise ValueError(f"weight_decay {self.weight_decay} outside [{lo}, {hi}]")
        if self.num_train_epochs < 1 or self.max_length < 8:
            raise ValueError("num_train_epochs must be >= 1 and max_length >= 8")

    def to_lines(self) -> str:
        out = []
        for f in fields(self):
            value = getattr(self, f.name)
            out.append(f"{f.name} = {value}")
        return "\n".join(out) + "\n"


def load_config(path: str | Path, **overrides) -> AdapterConfig:
    """Parse ``key = value`` lines; '#' starts a comment; later keys win."""
    path = Path(path)
    values: dict = {}
    known = {f.name: f.type for f in fields(AdapterConfig)}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in known:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _coerce(key, value, path, lineno)
    values.update(overrides)
    return AdapterConfig(**values)


def _coerce(key: str, value: str, path: Path, lineno: int):
    kind = {f.name: f.default for f in fields(AdapterConfig)}[key]
    try:
        if isinstance(kind, bool):
            return _BOOL[value.lower()]
        if isinstance(kind, int):
            return int(value)
        if isinstance(kind, float):
            return float(value)
        return value
    except (KeyError, ValueError) as exc:
        raise ValueError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
