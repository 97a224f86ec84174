"""Pretrained word-embedding tables in the whitespace text format.

Files may start with an optional "rows dim" header line; every other line
is a word followed by ``dim`` reals.  Duplicate words keep their first
vector.  Out-of-vocabulary lookups resolve to a zero vector or to the
table mean, chosen at load time.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ..errors import DataError

__all__ = ["EmbeddingMatrix", "load_embeddings", "PAD_ID", "OOV_ID"]

logger = logging.getLogger(__name__)

PAD_ID = -1
OOV_ID = -2

_OOV_POLICIES = ("zero", "mean")


@dataclass(frozen=True)
class EmbeddingMatrix:
    vocab: dict  # word -> row index
    matrix: np.ndarray  # (rows, dim) float64
    oov_policy: str  # "zero" | "mean"

    def __post_init__(self):
        if self.oov_policy not in _OOV_POLICIES:
            raise ValueError(f"oov_policy must be one of {_OOV_POLICIES}")
        if self.matrix.ndim != 2 or self.matrix.shape[0] != len(self.vocab):
            raise ValueError("matrix rows must match vocabulary size")
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("embedding matrix contains non-finite entries")

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def oov_vector(self) -> np.ndarray:
        if self.oov_policy == "mean" and len(self.vocab):
            return self.matrix.mean(axis=0)
        return np.zeros(self.dim, dtype=np.float64)

    def lookup_ids(self, words: Sequence[str]) -> list[int]:
        return [self.vocab.get(w, OOV_ID) for w in words]

    def lookup(self, word: str) -> np.ndarray:
        row = self.vocab.get(word)
        if row is None:
            return self.oov_vector()
        return self.matrix[row]


def load_embeddings(path: str | Path, oov_policy: str = "zero") -> EmbeddingMatrix:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read embeddings {path}: {exc}") from exc

    vocab: dict[str, int] = {}
    rows: list[np.ndarray] = []
    dim: int | None = None
    start = 0
    if lines:
        head = lines[0].split()
        if len(head) == 2 and all(f.lstrip("-").isdigit() for f in head):
            start = 1  # "rows dim" header
    for lineno, line in enumerate(lines[start:], start=start + 1):
        if not line.strip():
            continue
        fields = line.split()
        word, values = fields[0], fields[1:]
        if dim is None:
            if not values:
                raise DataError(f"{path}:{lineno}: no vector values")
            dim = len(values)
        elif len(values) != dim:
            raise DataError(
                f"{path}:{lineno}: expected {dim} values, got {len(values)}"
            )
        if word in vocab:
            logger.warning("duplicate embedding for %r at %s:%d; keeping first",
                           word, path, lineno)
            continue
        try:
            vec = np.array([float(v) for v in values], dtype=np.float64)
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: bad vector value: {exc}") from exc
        vocab[word] = len(rows)
        rows.append(vec)
    if not rows:
        raise DataError(f"{path}: no embedding vectors found")
    return EmbeddingMatrix(
        vocab=vocab, matrix=np.vstack(rows), oov_policy=oov_policy
    )
