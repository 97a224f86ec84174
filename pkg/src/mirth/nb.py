"""Token-feature baseline: TF-IDF over the top 3000 (1,3)-grams feeding a
multinomial Naive Bayes classifier with additive smoothing.

Gram selection is by document frequency with lexicographic tie-breaks, so
fitting is fully deterministic.  Ties at prediction time fall toward a
configurable class (the harness uses "nonjoke").
"""

from __future__ import annotations

import math
from collections import Counter
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import sparse
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_texts
from .errors import DataError
from .text import extract_ngrams, tokenize

__all__ = ["TfidfNgramVectorizer", "MultinomialNaiveBayes", "save_nb_model", "load_nb_model"]


class TfidfNgramVectorizer(BaseEstimator, TransformerMixin):
    """TF-IDF over word/punctuation n-grams.

    Fitted on training texts only.  Grams are ranked by document frequency
    (ties broken lexicographically) and capped at ``max_features``; idf uses
    the smoothed form ln((1+N)/(1+df)) + 1.  Vectors are raw counts times
    idf, L2-normalized; out-of-vocabulary grams are ignored.
    """

    def __init__(self, max_features: int = 3000, ngram_range: tuple[int, int] = (1, 3)):
        self.max_features = max_features
        self.ngram_range = ngram_range

    def fit(self, texts: Sequence[str], y=None):
        texts = check_texts(texts)
        n_min, n_max = self.ngram_range
        df: Counter[tuple[str, ...]] = Counter()
        for text in texts:
            df.update(set(extract_ngrams(tokenize(text), n_min, n_max)))
        ranked = sorted(df.items(), key=lambda kv: (-kv[1], kv[0]))
        kept = ranked[: self.max_features]
        n_docs = len(texts)
        self.vocabulary_ = {gram: i for i, (gram, _) in enumerate(kept)}
        self.idf_ = np.array(
            [math.log((1 + n_docs) / (1 + df_t)) + 1.0 for _, df_t in kept],
            dtype=np.float64,
        )
        return self

    def transform(self, texts: Sequence[str]) -> sparse.csr_matrix:
        check_is_fitted(self, "vocabulary_")
        texts = check_texts(texts, allow_empty=True)
        n_min, n_max = self.ngram_range
        data, indices, indptr = [], [], [0]
        for text in texts:
            counts: Counter[int] = Counter()
            for gram in extract_ngrams(tokenize(text), n_min, n_max):
                idx = self.vocabulary_.get(gram)
                if idx is not None:
                    counts[idx] += 1
            row_idx = sorted(counts)
            row = np.array([counts[i] * self.idf_[i] for i in row_idx], dtype=np.float64)
            norm = np.linalg.norm(row)
            if norm > 0:
                row /= norm
            data.extend(row)
            indices.extend(row_idx)
            indptr.append(len(indices))
        return sparse.csr_matrix(
            (np.asarray(data, dtype=np.float64), indices, indptr),
            shape=(len(texts), len(self.vocabulary_)),
        )


class MultinomialNaiveBayes(BaseEstimator, ClassifierMixin):
    """Multinomial NB over fractional (TF-IDF) feature weights."""

    def __init__(self, alpha: float = 1.0, tie_break: str | None = None):
        self.alpha = alpha
        self.tie_break = tie_break

    def fit(self, X: sparse.spmatrix, y: Sequence[str]):
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        y = list(y)
        if X.shape[0] != len(y):
            raise ValueError(f"X has {X.shape[0]} rows but y has {len(y)} labels")
        self.classes_ = sorted(set(y))
        if len(self.classes_) < 2:
            raise ValueError("training data must contain at least two classes")
        X = sparse.csr_matrix(X, dtype=np.float64)
        n_features = X.shape[1]
        y_arr = np.array(y)
        priors = []
        log_likelihoods = []
        for cls in self.classes_:
            rows = X[y_arr == cls]
            priors.append(math.log(rows.shape[0] / X.shape[0]))
            mass = np.asarray(rows.sum(axis=0)).ravel() + self.alpha
            log_likelihoods.append(np.log(mass / mass.sum()))
        self.class_log_prior_ = np.array(priors, dtype=np.float64)
        self.feature_log_likelihood_ = np.vstack(log_likelihoods)
        self.n_features_ = n_features
        return self

    def joint_log_scores(self, X: sparse.spmatrix) -> np.ndarray:
        """Per-class unnormalized log scores, one row per input vector."""
        check_is_fitted(self, "classes_")
        X = sparse.csr_matrix(X, dtype=np.float64)
        return X @ self.feature_log_likelihood_.T + self.class_log_prior_

    def predict(self, X: sparse.spmatrix) -> list[str]:
        scores = self.joint_log_scores(X)
        out = []
        tie_idx = (
            self.classes_.index(self.tie_break)
            if self.tie_break in (self.classes_ or [])
            else None
        )
        for row in scores:
            best = row.max()
            winners = np.nonzero(row >= best - 1e-12)[0]
            if tie_idx is not None and tie_idx in winners:
                out.append(self.classes_[tie_idx])
            else:
                out.append(self.classes_[winners[0]])
        return out


# -- persistence --------------------------------------------------------------

_HEADER = "MIRTH-NB v1"


def save_nb_model(path: str | Path, vectorizer: TfidfNgramVectorizer,
                  classifier: MultinomialNaiveBayes) -> None:
    """Write vocabulary, idf, priors and likelihoods at full decimal precision."""
    check_is_fitted(vectorizer, "vocabulary_")
    check_is_fitted(classifier, "classes_")
    lines = [
        _HEADER,
        f"alpha\t{classifier.alpha!r}",
        f"tie_break\t{classifier.tie_break or ''}",
        f"ngram_range\t{vectorizer.ngram_range[0]}\t{vectorizer.ngram_range[1]}",
        "classes\t" + "\t".join(classifier.classes_),
        "priors\t" + "\t".join(repr(float(v)) for v in classifier.class_log_prior_),
    ]
    grams = sorted(vectorizer.vocabulary_, key=vectorizer.vocabulary_.get)
    for idx, gram in enumerate(grams):
        ll = "\t".join(repr(float(v)) for v in classifier.feature_log_likelihood_[:, idx])
        lines.append(
            f"feature\t{idx}\t{' '.join(gram)}\t{float(vectorizer.idf_[idx])!r}\t{ll}"
        )
    lines.append("end")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_nb_model(path: str | Path) -> tuple[TfidfNgramVectorizer, MultinomialNaiveBayes]:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read NB model {path}: {exc}") from exc
    if not lines or lines[0] != _HEADER:
        raise DataError(f"{path}:1: not a {_HEADER} file")

    meta: dict[str, list[str]] = {}
    features: list[tuple[int, tuple[str, ...], float, list[float]]] = []
    terminated = False
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        fields = line.split("\t")
        kind = fields[0]
        try:
            if kind in ("alpha", "tie_break", "classes", "priors", "ngram_range"):
                meta[kind] = fields[1:]
            elif kind == "feature":
                idx = int(fields[1])
                gram = tuple(fields[2].split(" "))
                idf = float(fields[3])
                lls = [float(v) for v in fields[4:]]
                features.append((idx, gram, idf, lls))
            elif kind == "end":
                terminated = True
                break
            else:
                raise DataError(f"{path}:{lineno}: unknown record type {kind!r}")
        except (ValueError, IndexError) as exc:
            raise DataError(f"{path}:{lineno}: malformed record: {exc}") from exc
    if not terminated:
        raise DataError(f"{path}: truncated model file (missing end record)")
    for key in ("alpha", "classes", "priors", "ngram_range"):
        if key not in meta:
            raise DataError(f"{path}: missing {key} record")

    features.sort(key=lambda f: f[0])
    if [f[0] for f in features] != list(range(len(features))):
        raise DataError(f"{path}: feature indices are not dense")

    vectorizer = TfidfNgramVectorizer(
        max_features=len(features),
        ngram_range=(int(meta["ngram_range"][0]), int(meta["ngram_range"][1])),
    )
    vectorizer.vocabulary_ = {gram: idx for idx, gram, _, _ in features}
    vectorizer.idf_ = np.array([f[2] for f in features], dtype=np.float64)

    classes = meta["classes"]
    classifier = MultinomialNaiveBayes(
        alpha=float(meta["alpha"][0]),
        tie_break=(meta.get("tie_break", [""])[0] or None),
    )
    classifier.classes_ = classes
    classifier.class_log_prior_ = np.array([float(v) for v in meta["priors"]], dtype=np.float64)
    ll = np.zeros((len(classes), len(features)), dtype=np.float64)
    for idx, _, _, lls in features:
        if len(lls) != len(classes):
            raise DataError(f"{path}: feature {idx} has {len(lls)} likelihoods for {len(classes)} classes")
        ll[:, idx] = lls
    classifier.feature_log_likelihood_ = ll
    classifier.n_features_ = len(features)
    return vectorizer, classifier
