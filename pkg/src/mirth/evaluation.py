"""Metrics and estimators for the benchmark reports.

Accuracy with a normal-approximation 95% CI, binary F1, the expected
maximum validation accuracy as a function of the number of random
hyperparameter trials, cross-domain predicted-joke rates, and scoring of
prediction files produced by out-of-process models.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .datasets import JOKE, LabeledExample, PairExample
from .errors import DataError
from .text import Document

__all__ = [
    "EvalReport",
    "MaxAccCurve",
    "evaluate",
    "binomial_ci_halfwidth",
    "expected_max_curve",
    "cross_domain_rate",
    "read_predictions",
    "score_external",
]

_Z_95 = 1.96


@dataclass(frozen=True)
class EvalReport:
    n: int
    accuracy: float
    ci_halfwidth: float
    f1: float
    positive_label: str
    confusion: dict  # tp / fp / fn / tn wrt positive_label
    per_source: dict  # source -> {"n": int, "accuracy": float}

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "accuracy": self.accuracy,
            "ci_halfwidth": self.ci_halfwidth,
            "f1": self.f1,
            "positive_label": self.positive_label,
            "confusion": self.confusion,
            "per_source": self.per_source,
            "ci_method": "normal-approximation 95%",
        }

    def to_text(self) -> str:
        lines = [
            f"n          {self.n}",
            f"accuracy   {self.accuracy:.4f} ± {self.ci_halfwidth:.4f} (95% CI, normal approx.)",
            f"f1         {self.f1:.4f} (positive = {self.positive_label})",
            "confusion  tp={tp} fp={fp} fn={fn} tn={tn}".format(**self.confusion),
        ]
        for source in sorted(self.per_source):
            stats = self.per_source[source]
            lines.append(f"  {source:<12} n={stats['n']:<6} acc={stats['accuracy']:.4f}")
        return "\n".join(lines)


def _gold_items(golds: Iterable) -> list[tuple[str, str, str | None]]:
    items = []
    for g in golds:
        if isinstance(g, LabeledExample):
            items.append((g.id, g.label, g.source))
        elif isinstance(g, PairExample):
            items.append((g.id, g.target, None))
        else:
            raise TypeError(f"cannot evaluate gold of type {type(g).__name__}")
    return items


def evaluate(
    predictions: Mapping[str, str] | Iterable[tuple[str, str]],
    golds: Iterable,
    positive_label: str | None = None,
) -> EvalReport:
    """Score predictions against gold examples, aligned by id.

    ``positive_label`` defaults to "joke" for single-task golds and "a"
    for pairwise golds.
    """
    preds = dict(predictions)
    gold_items = _gold_items(golds)
    if not gold_items:
        raise ValueError("no gold examples to evaluate")
    gold_ids = {gid for gid, _, _ in gold_items}
    if len(gold_ids) != len(gold_items):
        raise DataError("duplicate ids in gold examples")
    missing = gold_ids - preds.keys()
    extra = preds.keys() - gold_ids
    if missing or extra:
        parts = []
        if missing:
            parts.append("missing predictions for: " + _preview(sorted(missing)))
        if extra:
            parts.append("unexpected prediction ids: " + _preview(sorted(extra)))
        raise DataError("; ".join(parts))

    if positive_label is None:
        positive_label = "a" if isinstance(next(iter(golds)), PairExample) else JOKE

    tp = fp = fn = tn = 0
    per_source: dict[str, dict[str, float]] = {}
    for gid, gold, source in gold_items:
        pred = preds[gid]
        correct = pred == gold
        if pred == positive_label and gold == positive_label:
            tp += 1
        elif pred == positive_label:
            fp += 1
        elif gold == positive_label:
            fn += 1
        else:
            tn += 1
        if source is not None:
            stats = per_source.setdefault(source, {"n": 0, "correct": 0})
            stats["n"] += 1
            stats["correct"] += int(correct)

    n = len(gold_items)
    accuracy = (tp + tn) / n
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = (
        2 * precision * recall / (precision + recall)
        if precision + recall
        else 0.0
    )
    per_source_out = {
        s: {"n": v["n"], "accuracy": v["correct"] / v["n"]} for s, v in per_source.items()
    }
    return EvalReport(
        n=n,
        accuracy=accuracy,
        ci_halfwidth=binomial_ci_halfwidth(accuracy, n),
        f1=f1,
        positive_label=positive_label,
        confusion={"tp": tp, "fp": fp, "fn": fn, "tn": tn},
        per_source=per_source_out,
    )


def _preview(items: Sequence[str], limit: int = 5) -> str:
    shown = ", ".join(items[:limit])
    extra = len(items) - min(len(items), limit)
    return shown + (f" (+{extra} more)" if extra else "")


def binomial_ci_halfwidth(p: float, n: int) -> float:
    """95% normal-approximation halfwidth: 1.96 * sqrt(p(1-p)/n)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    return _Z_95 * math.sqrt(p * (1.0 - p) / n)


@dataclass(frozen=True)
class MaxAccCurve:
    """Expected best validation accuracy after n random trials, n = 1..N."""

    points: tuple[tuple[int, float], ...]

    def to_csv(self) -> str:
        lines = ["n,expected_max"]
        lines.extend(f"{n},{v!r}" for n, v in self.points)
        return "\n".join(lines) + "\n"


def expected_max_curve(val_accs: Sequence[float], max_n: int) -> MaxAccCurve:
    """Expected maximum of n i.i.d. draws from the empirical distribution.

    With sorted observations x(1) <= ... <= x(N):
        E[max_n] = sum_i x(i) * ((i/N)^n - ((i-1)/N)^n)
    which is the draws-with-replacement form of the estimator.
    """
    xs = sorted(float(v) for v in val_accs)
    if not xs:
        raise ValueError("need at least one validation accuracy")
    if max_n < 1:
        raise ValueError(f"max_n must be >= 1, got {max_n}")
    n_obs = len(xs)
    points = []
    for n in range(1, max_n + 1):
        total = 0.0
        for i, x in enumerate(xs, start=1):
            total += x * ((i / n_obs) ** n - ((i - 1) / n_obs) ** n)
        points.append((n, total))
    return MaxAccCurve(points=tuple(points))


@dataclass(frozen=True)
class CrossDomainReport:
    n: int
    rate: float  # fraction of the corpus labeled as joke
    ci_halfwidth: float

    def to_dict(self) -> dict:
        return {"n": self.n, "predicted_joke_rate": self.rate, "ci_halfwidth": self.ci_halfwidth}


def cross_domain_rate(
    predict: Callable[[list[str]], Sequence[str]],
    documents: Sequence[Document],
) -> CrossDomainReport:
    """Fraction of an out-of-domain corpus a trained detector labels JOKE."""
    if not documents:
        raise ValueError("empty corpus")
    labels = list(predict([d.raw_text for d in documents]))
    if len(labels) != len(documents):
        raise ValueError("predict() returned a different number of labels")
    rate = sum(1 for lab in labels if lab == JOKE) / len(documents)
    return CrossDomainReport(
        n=len(documents), rate=rate, ci_halfwidth=binomial_ci_halfwidth(rate, len(documents))
    )


# -- external-predictor protocol ------------------------------------------------

_VALID_PREDS = {"single": {JOKE, "nonjoke"}, "pairwise": {"a", "b"}}


def read_predictions(path: str | Path, task: str) -> dict[str, str]:
    """Read {"id", "pred", "score"} JSONL; scores are validated but unused."""
    if task not in _VALID_PREDS:
        raise ValueError(f"unknown task {task!r}")
    path = Path(path)
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read predictions {path}: {exc}") from exc
    preds: dict[str, str] = {}
    with fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(obj, dict) or "id" not in obj or "pred" not in obj:
                raise DataError(f"{path}:{lineno}: record must carry 'id' and 'pred'")
            pred = obj["pred"]
            if pred not in _VALID_PREDS[task]:
                raise DataError(
                    f"{path}:{lineno}: invalid prediction {pred!r} for task {task!r}"
                )
            if "score" in obj and not isinstance(obj["score"], (int, float)):
                raise DataError(f"{path}:{lineno}: score must be numeric")
            if obj["id"] in preds:
                raise DataError(f"{path}:{lineno}: duplicate prediction for id {obj['id']!r}")
            preds[obj["id"]] = pred
    return preds


def score_external(pred_path: str | Path, golds: Sequence, task: str) -> EvalReport:
    """Score an external prediction file through the same metric path."""
    preds = read_predictions(pred_path, task)
    return evaluate(preds, golds)
