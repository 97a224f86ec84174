"""Averaged-perceptron part-of-speech tagger.

Greedy left-to-right decoding over a small hand-rolled feature set:
current/previous/next word forms, prefixes and suffixes up to length 3,
and the previously *predicted* tag.  Frequent words that are effectively
unambiguous in the training data short-circuit through a lexicon.  The
affix features carry unknown words, which matters here because rare words
are exactly the ones the template generator replaces.

Training is fully deterministic given the seed; tagging is a pure
function of (model, tokens).
"""

from __future__ import annotations

import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .errors import DataError
from .text import Token

__all__ = ["PUNCT_TAG", "TaggedToken", "PerceptronTagger", "read_conllu"]

PUNCT_TAG = "PUNCT"

_START = "<s>"
_END = "</s>"


@dataclass(frozen=True, slots=True)
class TaggedToken:
    token: Token
    pos: str


def _is_punct_word(word: str) -> bool:
    return len(word) == 1 and not word.isalnum()


def _features(words: Sequence[str], i: int, prev_tag: str) -> list[str]:
    w = words[i]
    prev_w = words[i - 1] if i > 0 else _START
    next_w = words[i + 1] if i + 1 < len(words) else _END
    feats = [
        "bias",
        f"w {w}",
        f"prev {prev_w}",
        f"next {next_w}",
        f"ptag {prev_tag}",
    ]
    for k in (1, 2, 3):
        if len(w) >= k:
            feats.append(f"pre{k} {w[:k]}")
            feats.append(f"suf{k} {w[-k:]}")
    return feats


class PerceptronTagger(BaseEstimator):
    """Trainable POS tagger with a fit/predict interface.

    Parameters
    ----------
    epochs : passes over the shuffled training sentences.
    seed : drives the per-epoch shuffle; identical seeds give identical models.
    lexicon_min_count / lexicon_purity : a word seen at least ``min_count``
        times carrying one tag at least ``purity`` of the time bypasses the
        classifier entirely.
    """

    def __init__(self, epochs: int = 5, seed: int = 1,
                 lexicon_min_count: int = 5, lexicon_purity: float = 0.97):
        self.epochs = epochs
        self.seed = seed
        self.lexicon_min_count = lexicon_min_count
        self.lexicon_purity = lexicon_purity

    # -- training ---------------------------------------------------------

    def fit(self, tagged_sentences: Iterable[Sequence[tuple[str, str]]]):
        sentences = [
            [(w.casefold(), t) for w, t in sent] for sent in tagged_sentences
        ]
        sentences = [s for s in sentences if s]
        if not sentences:
            raise ValueError("training data must contain at least one tagged sentence")
        for sent in sentences:
            for word, tag in sent:
                if not tag:
                    raise ValueError(f"empty tag for word {word!r}")

        tagset = sorted({t for sent in sentences for _, t in sent})
        lexicon = self._build_lexicon(sentences)

        weights: dict[str, dict[str, float]] = defaultdict(dict)
        totals: dict[tuple[str, str], float] = defaultdict(float)
        stamps: dict[tuple[str, str], int] = defaultdict(int)
        instant = 0

        def upd(feature: str, tag: str, delta: float) -> None:
            key = (feature, tag)
            current = weights[feature].get(tag, 0.0)
            totals[key] += (instant - stamps[key]) * current
            weights[feature][tag] = current + delta
            stamps[key] = instant

        rng = random.Random(self.seed)
        order = list(range(len(sentences)))
        for _ in range(self.epochs):
            rng.shuffle(order)
            for idx in order:
                sent = sentences[idx]
                words = [w for w, _ in sent]
                prev_tag = _START
                for i, (word, gold) in enumerate(sent):
                    if _is_punct_word(word):
                        guess = PUNCT_TAG
                    elif word in lexicon:
                        guess = lexicon[word]
                    else:
                        instant += 1
                        feats = _features(words, i, prev_tag)
                        guess = self._score_tags(weights, feats, tagset)
                        if guess != gold:
                            for f in feats:
                                upd(f, gold, 1.0)
                                upd(f, guess, -1.0)
                    prev_tag = guess

        # Average, letting the final state count for one extra instant so a
        # last-step update does not vanish to exactly zero.
        horizon = instant + 1
        averaged: dict[str, dict[str, float]] = {}
        for feature, tag_weights in weights.items():
            row = {}
            for tag, value in tag_weights.items():
                key = (feature, tag)
                total = totals[key] + (horizon - stamps[key]) * value
                if total != 0.0:
                    row[tag] = total / horizon
            if row:
                averaged[feature] = row

        self.tagset_ = tagset
        self.lexicon_ = lexicon
        self.weights_ = averaged
        return self

    def _build_lexicon(self, sentences) -> dict[str, str]:
        tag_counts: dict[str, Counter[str]] = defaultdict(Counter)
        for sent in sentences:
            for word, tag in sent:
                tag_counts[word][tag] += 1
        lexicon = {}
        for word, counts in tag_counts.items():
            if _is_punct_word(word):
                continue
            total = sum(counts.values())
            tag, n = counts.most_common(1)[0]
            if total >= self.lexicon_min_count and n / total >= self.lexicon_purity:
                lexicon[word] = tag
        return lexicon

    @staticmethod
    def _score_tags(weights, features: Sequence[str], tagset: Sequence[str]) -> str:
        scores = dict.fromkeys(tagset, 0.0)
        for f in features:
            for tag, value in weights.get(f, {}).items():
                scores[tag] = scores.get(tag, 0.0) + value
        # Deterministic tie-break: highest score, then tag name.
        return max(scores, key=lambda t: (scores[t], t))

    # -- tagging ----------------------------------------------------------

    def predict(self, tokens: Sequence[Token]) -> list[TaggedToken]:
        """Tag one token sequence; punctuation tokens get PUNCT outright."""
        check_is_fitted(self, "weights_")
        words = [t.normalized for t in tokens]
        tags = []
        prev_tag = _START
        for i, token in enumerate(tokens):
            if token.is_punct:
                tag = PUNCT_TAG
            else:
                tag = self._tag_word(words, i, prev_tag)
            tags.append(tag)
            prev_tag = tag
        return [TaggedToken(token=t, pos=tag) for t, tag in zip(tokens, tags)]

    def predict_words(self, words: Sequence[str]) -> list[str]:
        """Tag a plain word sequence (used for CoNLL-style evaluation)."""
        check_is_fitted(self, "weights_")
        normed = [w.casefold() for w in words]
        tags = []
        prev_tag = _START
        for i, word in enumerate(normed):
            if _is_punct_word(word):
                tag = PUNCT_TAG
            else:
                tag = self._tag_word(normed, i, prev_tag)
            tags.append(tag)
            prev_tag = tag
        return tags

    def _tag_word(self, words: Sequence[str], i: int, prev_tag: str) -> str:
        word = words[i]
        if word in self.lexicon_:
            return self.lexicon_[word]
        return self._score_tags(self.weights_, _features(words, i, prev_tag), self.tagset_)

    # -- persistence ------------------------------------------------------

    _HEADER = "MIRTH-TAGGER v1"

    def save(self, path: str | Path) -> None:
        check_is_fitted(self, "weights_")
        lines = [self._HEADER, "tagset\t" + "\t".join(self.tagset_)]
        for word in sorted(self.lexicon_):
            lines.append(f"lexicon\t{word}\t{self.lexicon_[word]}")
        for feature in sorted(self.weights_):
            for tag in sorted(self.weights_[feature]):
                lines.append(f"weight\t{feature}\t{tag}\t{self.weights_[feature][tag]!r}")
        lines.append("end")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "PerceptronTagger":
        path = Path(path)
        try:
            raw = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise DataError(f"cannot read tagger model {path}: {exc}") from exc
        lines = raw.splitlines()
        if not lines or lines[0] != cls._HEADER:
            raise DataError(f"{path}:1: not a {cls._HEADER} file")
        tagger = cls()
        tagset: list[str] | None = None
        lexicon: dict[str, str] = {}
        weights: dict[str, dict[str, float]] = defaultdict(dict)
        terminated = False
        for lineno, line in enumerate(lines[1:], start=2):
            if not line:
                continue
            fields = line.split("\t")
            kind = fields[0]
            if kind == "tagset":
                tagset = fields[1:]
            elif kind == "lexicon":
                if len(fields) != 3:
                    raise DataError(f"{path}:{lineno}: malformed lexicon record")
                lexicon[fields[1]] = fields[2]
            elif kind == "weight":
                if len(fields) != 4:
                    raise DataError(f"{path}:{lineno}: malformed weight record")
                try:
                    weights[fields[1]][fields[2]] = float(fields[3])
                except ValueError as exc:
                    raise DataError(f"{path}:{lineno}: bad weight value {fields[3]!r}") from exc
            elif kind == "end":
                terminated = True
                break
            else:
                raise DataError(f"{path}:{lineno}: unknown record type {kind!r}")
        if tagset is None:
            raise DataError(f"{path}: missing tagset record")
        if not terminated:
            raise DataError(f"{path}: truncated model file (missing end record)")
        tagger.tagset_ = tagset
        tagger.lexicon_ = lexicon
        tagger.weights_ = dict(weights)
        return tagger


def read_conllu(path: str | Path) -> list[list[tuple[str, str]]]:
    """Read (FORM, UPOS) sentences from a CoNLL-U file.

    Only columns 2 and 4 are consumed.  Comment lines, multiword-token
    ranges and empty-node ids are skipped; a blank line ends a sentence.
    """
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read CoNLL-U file {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise DataError(f"{path}: not valid UTF-8: {exc}") from exc

    sentences: list[list[tuple[str, str]]] = []
    current: list[tuple[str, str]] = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if line.startswith("#"):
            continue
        if not line.strip():
            if current:
                sentences.append(current)
                current = []
            continue
        fields = line.split("\t")
        if len(fields) < 4:
            raise DataError(
                f"{path}:{lineno}: expected at least 4 tab-separated columns"
            )
        if not fields[0].isdigit():
            continue  # multiword ranges (1-2) and empty nodes (1.1)
        form, upos = fields[1], fields[3]
        if upos == "_":
            continue
        current.append((form, upos))
    if current:
        sentences.append(current)
    if not sentences:
        raise DataError(f"{path}: no tagged sentences found")
    return sentences
