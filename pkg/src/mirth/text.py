"""Tokenization, word-frequency statistics and n-gram extraction.

Everything downstream (tagging, negative generation, classifiers) works on
the token streams produced here, so the rules are deliberately small and
deterministic: words split on whitespace, every punctuation character is
its own single-character token, and apostrophes or hyphens survive only
between alphanumeric characters.  No learned segmentation anywhere.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from ._validation import check_fraction, check_text

__all__ = [
    "Token",
    "Document",
    "FrequencyTable",
    "tokenize",
    "make_document",
    "render_tokens",
    "build_frequency_table",
    "extract_ngrams",
]

# Characters allowed to glue a word together when both neighbours are
# alphanumeric ("auto's", "e-mail", right single quote for curly input).
_JOINERS = frozenset({"'", "’", "-"})


@dataclass(frozen=True, slots=True)
class Token:
    """One token of a document: surface form plus span back into the raw text."""

    surface: str
    normalized: str
    char_span: tuple[int, int]
    is_punct: bool
    is_word: bool


@dataclass(frozen=True, slots=True)
class Document:
    id: str
    raw_text: str
    tokens: tuple[Token, ...]

    def word_tokens(self) -> list[Token]:
        return [t for t in self.tokens if t.is_word]


def _classify(surface: str) -> tuple[bool, bool]:
    """Return (is_punct, is_word) for a token surface.

    Numerals and mixed alphanumerics are neither: they are kept as tokens
    but never counted as words nor treated as punctuation.
    """
    if len(surface) == 1 and not surface.isalnum():
        return True, False
    has_alpha = any(c.isalpha() for c in surface)
    only_word_chars = all(c.isalpha() or c in _JOINERS for c in surface)
    return False, has_alpha and only_word_chars


def tokenize(raw_text: str) -> list[Token]:
    """Split raw text into tokens whose spans reconstruct the input exactly."""
    check_text(raw_text, "raw_text")
    tokens: list[Token] = []
    i, n = 0, len(raw_text)
    while i < n:
        ch = raw_text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isalnum():
            j = i + 1
            while j < n:
                c = raw_text[j]
                if c.isalnum():
                    j += 1
                elif c in _JOINERS and j + 1 < n and raw_text[j + 1].isalnum():
                    # Joiner is internal: previous char is alnum by construction.
                    j += 1
                else:
                    break
            surface = raw_text[i:j]
        else:
            surface = ch
            j = i + 1
        is_punct, is_word = _classify(surface)
        tokens.append(
            Token(
                surface=surface,
                normalized=surface.casefold(),
                char_span=(i, j),
                is_punct=is_punct,
                is_word=is_word,
            )
        )
        i = j
    return tokens


def make_document(doc_id: str, raw_text: str) -> Document:
    return Document(id=doc_id, raw_text=raw_text, tokens=tuple(tokenize(raw_text)))


def render_tokens(document: Document, surfaces: Sequence[str]) -> str:
    """Rebuild text from replacement surfaces, keeping the original spacing.

    ``surfaces`` must be positionally aligned with ``document.tokens``; the
    inter-token gaps (whitespace and any untokenized slack) come verbatim
    from the original raw text.
    """
    if len(surfaces) != len(document.tokens):
        raise ValueError(
            f"got {len(surfaces)} surfaces for {len(document.tokens)} tokens"
        )
    raw = document.raw_text
    parts: list[str] = []
    cursor = 0
    for token, surface in zip(document.tokens, surfaces):
        start, end = token.char_span
        parts.append(raw[cursor:start])
        parts.append(surface)
        cursor = end
    parts.append(raw[cursor:])
    return "".join(parts)


@dataclass(frozen=True)
class FrequencyTable:
    """Corpus-wide occurrence counts of normalized word tokens."""

    counts: Mapping[str, int]
    total_tokens: int

    def frequency(self, word: str) -> int:
        return self.counts.get(word, 0)

    def vocabulary_size(self) -> int:
        return len(self.counts)

    def percentile_threshold(self, q: float) -> int:
        """Nearest-rank percentile over the distinct-word count multiset.

        Vocabulary-weighted: each distinct word contributes one entry,
        regardless of how often it occurs.  q=0 returns the minimum count.
        """
        check_fraction(q, "q")
        if not self.counts:
            raise ValueError("empty frequency table")
        values = sorted(self.counts.values())
        # round() guards binary-float slack in q*V (e.g. 0.62*50) so the
        # rank matches the exact decimal arithmetic.
        rank = max(1, math.ceil(round(q * len(values), 9)))
        return values[rank - 1]


def build_frequency_table(documents: Iterable[Document]) -> FrequencyTable:
    """Count normalized word tokens across documents; punctuation excluded."""
    counts: Counter[str] = Counter()
    for doc in documents:
        counts.update(t.normalized for t in doc.tokens if t.is_word)
    return FrequencyTable(counts=dict(counts), total_tokens=sum(counts.values()))


def frequency_percentile_threshold(table: FrequencyTable, q: float) -> int:
    return table.percentile_threshold(q)


def extract_ngrams(tokens: Sequence[Token], n_min: int, n_max: int) -> list[tuple[str, ...]]:
    """All contiguous n-grams of orders n_min..n_max over normalized tokens.

    Punctuation tokens participate as gram elements.  Grams are emitted in
    document order, lowest order first.
    """
    if not (1 <= n_min <= n_max):
        raise ValueError(f"need 1 <= n_min <= n_max, got ({n_min}, {n_max})")
    norms = [t.normalized for t in tokens]
    grams: list[tuple[str, ...]] = []
    for n in range(n_min, n_max + 1):
        grams.extend(tuple(norms[i : i + n]) for i in range(len(norms) - n + 1))
    return grams
