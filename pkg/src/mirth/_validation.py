"""Small input-validation helpers used by the public estimators and ops."""

from __future__ import annotations

from typing import Iterable, Sequence


def check_text(value, name: str = "text") -> str:
    if not isinstance(value, str):
        raise TypeError(f"{name} must be a string, got {type(value).__name__}")
    return value


def check_texts(values: Iterable, name: str = "texts", allow_empty: bool = False) -> list[str]:
    out = list(values)
    if not out and not allow_empty:
        raise ValueError(f"{name} must be a non-empty sequence of strings")
    for i, v in enumerate(out):
        if not isinstance(v, str):
            raise TypeError(f"{name}[{i}] must be a string, got {type(v).__name__}")
    return out


def check_fraction(value, name: str, *, low: float = 0.0, high: float = 1.0,
                   low_open: bool = False) -> float:
    value = float(value)
    if low_open and not (low < value <= high):
        raise ValueError(f"{name} must be in ({low}, {high}], got {value}")
    if not low_open and not (low <= value <= high):
        raise ValueError(f"{name} must be in [{low}, {high}], got {value}")
    return value


def check_positive_int(value, name: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return value


def check_ratios(ratios: Sequence[float]) -> tuple[float, float, float]:
    ratios = tuple(float(r) for r in ratios)
    if len(ratios) != 3:
        raise ValueError(f"ratios must have exactly three entries, got {len(ratios)}")
    if any(r < 0 for r in ratios):
        raise ValueError(f"ratios must be non-negative, got {ratios}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {ratios} (sum {sum(ratios)})")
    return ratios
