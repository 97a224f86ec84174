"""Hard-negative generation by dynamic-template substitution.

A joke is treated as a template whose low-corpus-frequency words are
slots.  Slots are refilled with words of the same POS tag harvested from
a few randomly sampled context jokes, so the output keeps the global
structure and vocabulary of the corpus while losing its coherence.

Rules that shape the output:
  * at least one replacement per 25 characters (floor, minimum 1);
  * only words at or below the corpus-frequency percentile threshold are
    eligible, rarest first;
  * a replaced word changes at every one of its occurrences, to the same
    replacement;
  * punctuation and spacing are untouched, and casing is copied from the
    displaced token.

Every document draws its own RNG stream from (rng_seed, document id), so
corpus-level generation is order-independent and reproducible.
"""

from __future__ import annotations

import hashlib
import json
import random
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_fraction, check_positive_int
from .errors import DataError
from .tagger import PerceptronTagger, TaggedToken
from .text import Document, FrequencyTable, build_frequency_table, render_tokens, tokenize

__all__ = [
    "DTParams",
    "Slot",
    "ReplacementRecord",
    "NegativeExample",
    "min_replacements",
    "select_slots",
    "build_context_pool",
    "generate_negative",
    "generate_negative_corpus",
    "DynamicTemplateGenerator",
    "write_negatives",
    "read_negatives",
]


@dataclass(frozen=True)
class DTParams:
    """Generator parametrization; defaults follow the benchmark recipe."""

    max_freq_percentile: float = 0.62
    chars_per_replacement: int = 25
    context_sample_size: int = 3
    max_context_resamples: int = 5
    rng_seed: int = 1

    def __post_init__(self):
        check_fraction(self.max_freq_percentile, "max_freq_percentile", low_open=True)
        check_positive_int(self.chars_per_replacement, "chars_per_replacement")
        check_positive_int(self.context_sample_size, "context_sample_size")
        if self.max_context_resamples < 0:
            raise ValueError("max_context_resamples must be >= 0")


@dataclass(frozen=True)
class Slot:
    """A replacement target: one distinct word with all its positions."""

    word: str
    pos: str
    positions: tuple[int, ...]


@dataclass(frozen=True)
class ReplacementRecord:
    original_word: str
    replacement_word: str
    pos: str
    positions: tuple[int, ...]


@dataclass(frozen=True)
class NegativeExample:
    source_id: str
    text: str
    replacements: tuple[ReplacementRecord, ...]
    degenerate: bool


def _doc_rng(seed: int, doc_id: str) -> random.Random:
    digest = hashlib.sha256(f"{seed}\x1f{doc_id}".encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def min_replacements(raw_text: str, params: DTParams) -> int:
    """Replacement floor: one per ``chars_per_replacement`` chars, at least 1."""
    return max(1, len(raw_text) // params.chars_per_replacement)


def select_slots(
    joke: Document,
    tagged: Sequence[TaggedToken],
    table: FrequencyTable,
    params: DTParams,
    rng: random.Random,
) -> list[Slot]:
    """Pick the words to replace: rarest below-threshold words first.

    Candidates are the joke's distinct word tokens whose corpus frequency is
    at or below the percentile threshold; punctuation and numerals are never
    candidates.  Frequency ties are broken by a seeded shuffle.  Each slot
    carries every position of its word.
    """
    threshold = table.percentile_threshold(params.max_freq_percentile)
    positions: dict[str, list[int]] = defaultdict(list)
    pos_tag: dict[str, str] = {}
    for i, tt in enumerate(tagged):
        tok = tt.token
        if not tok.is_word:
            continue
        positions[tok.normalized].append(i)
        pos_tag.setdefault(tok.normalized, tt.pos)

    candidates = [w for w in positions if table.frequency(w) <= threshold]
    rng.shuffle(candidates)
    candidates.sort(key=table.frequency)  # stable: ties keep shuffled order

    wanted = min_replacements(joke.raw_text, params)
    return [
        Slot(word=w, pos=pos_tag[w], positions=tuple(positions[w]))
        for w in candidates[:wanted]
    ]


def build_context_pool(
    corpus: Sequence[Document],
    params: DTParams,
    exclude_id: str,
    tagger: PerceptronTagger,
    rng: random.Random,
    tag_cache: dict[str, list[TaggedToken]] | None = None,
) -> dict[str, list[str]]:
    """Sample context jokes and pool their words by POS tag.

    Duplicates are retained so that drawing from a pool entry is weighted
    by occurrence.  The source joke is never sampled.
    """
    others = [d for d in corpus if d.id != exclude_id]
    if len(others) < params.context_sample_size:
        raise DataError(
            f"corpus too small: need {params.context_sample_size} context documents "
            f"besides {exclude_id!r}, have {len(others)}"
        )
    # Canonical order so sampling is independent of corpus iteration order.
    others.sort(key=lambda d: d.id)
    sampled = rng.sample(others, params.context_sample_size)
    pool: dict[str, list[str]] = defaultdict(list)
    for doc in sampled:
        tagged = _tag_document(doc, tagger, tag_cache)
        for tt in tagged:
            if tt.token.is_word:
                pool[tt.pos].append(tt.token.normalized)
    return dict(pool)


def _tag_document(
    doc: Document,
    tagger: PerceptronTagger,
    cache: dict[str, list[TaggedToken]] | None,
) -> list[TaggedToken]:
    if cache is not None and doc.id in cache:
        return cache[doc.id]
    tagged = tagger.predict(doc.tokens)
    if cache is not None:
        cache[doc.id] = tagged
    return tagged


def _transfer_casing(word: str, displaced_surface: str) -> str:
    if displaced_surface.isupper() and len(displaced_surface) > 1:
        return word.upper()
    if displaced_surface[:1].isupper():
        return word[:1].upper() + word[1:]
    return word


def generate_negative(
    joke: Document,
    corpus: Sequence[Document],
    table: FrequencyTable,
    tagger: PerceptronTagger,
    params: DTParams,
    tag_cache: dict[str, list[TaggedToken]] | None = None,
) -> NegativeExample:
    """Generate one non-joke by refilling the joke's template slots.

    Per slot, a POS-matching word is drawn uniformly from the context pool;
    if the pool has no usable entry the pool is resampled (fresh context
    jokes) up to ``max_context_resamples`` times before the slot is skipped.
    The drawn word replaces the slot word at all its positions, copying each
    displaced token's casing.
    """
    rng = _doc_rng(params.rng_seed, joke.id)
    tagged = _tag_document(joke, tagger, tag_cache)
    slots = select_slots(joke, tagged, table, params, rng)

    pool = build_context_pool(corpus, params, joke.id, tagger, rng, tag_cache)
    surfaces = [t.surface for t in joke.tokens]
    records: list[ReplacementRecord] = []
    for slot in slots:
        choices = [w for w in pool.get(slot.pos, ()) if w != slot.word]
        resamples = 0
        while not choices and resamples < params.max_context_resamples:
            pool = build_context_pool(corpus, params, joke.id, tagger, rng, tag_cache)
            choices = [w for w in pool.get(slot.pos, ()) if w != slot.word]
            resamples += 1
        if not choices:
            continue
        replacement = rng.choice(choices)
        for i in slot.positions:
            surfaces[i] = _transfer_casing(replacement, joke.tokens[i].surface)
        records.append(
            ReplacementRecord(
                original_word=slot.word,
                replacement_word=replacement,
                pos=slot.pos,
                positions=slot.positions,
            )
        )

    text = render_tokens(joke, surfaces)
    degenerate = not records or _normalized_equal(text, joke.raw_text)
    return NegativeExample(
        source_id=joke.id,
        text=text,
        replacements=tuple(records),
        degenerate=degenerate,
    )


def _normalized_equal(a: str, b: str) -> bool:
    return [t.normalized for t in tokenize(a)] == [t.normalized for t in tokenize(b)]


def generate_negative_corpus(
    corpus: Sequence[Document],
    tagger: PerceptronTagger,
    params: DTParams,
) -> list[NegativeExample]:
    """One negative per corpus document, each on its own seeded RNG stream."""
    if not corpus:
        raise ValueError("corpus must be non-empty")
    table = build_frequency_table(corpus)
    cache: dict[str, list[TaggedToken]] = {}
    return [
        generate_negative(doc, corpus, table, tagger, params, tag_cache=cache)
        for doc in corpus
    ]


class DynamicTemplateGenerator(BaseEstimator):
    """Estimator wrapper: fit on the joke corpus, transform jokes to negatives."""

    def __init__(
        self,
        tagger: PerceptronTagger | None = None,
        max_freq_percentile: float = 0.62,
        chars_per_replacement: int = 25,
        context_sample_size: int = 3,
        max_context_resamples: int = 5,
        rng_seed: int = 1,
    ):
        self.tagger = tagger
        self.max_freq_percentile = max_freq_percentile
        self.chars_per_replacement = chars_per_replacement
        self.context_sample_size = context_sample_size
        self.max_context_resamples = max_context_resamples
        self.rng_seed = rng_seed

    def _params(self) -> DTParams:
        return DTParams(
            max_freq_percentile=self.max_freq_percentile,
            chars_per_replacement=self.chars_per_replacement,
            context_sample_size=self.context_sample_size,
            max_context_resamples=self.max_context_resamples,
            rng_seed=self.rng_seed,
        )

    def fit(self, documents: Sequence[Document], y=None):
        if self.tagger is None:
            raise ValueError("DynamicTemplateGenerator requires a trained tagger")
        if not documents:
            raise ValueError("corpus must be non-empty")
        self.corpus_ = list(documents)
        self.table_ = build_frequency_table(self.corpus_)
        self.tag_cache_ = {}
        return self

    def transform(self, documents: Sequence[Document] | None = None) -> list[NegativeExample]:
        check_is_fitted(self, "table_")
        docs = self.corpus_ if documents is None else documents
        params = self._params()
        return [
            generate_negative(
                doc, self.corpus_, self.table_, self.tagger, params,
                tag_cache=self.tag_cache_,
            )
            for doc in docs
        ]


# -- JSONL exchange --------------------------------------------------------

def write_negatives(path: str | Path, examples: Sequence[NegativeExample]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(json.dumps(_negative_to_obj(ex), ensure_ascii=False, sort_keys=True))
            fh.write("\n")


def _negative_to_obj(ex: NegativeExample) -> dict:
    return {
        "source_id": ex.source_id,
        "text": ex.text,
        "replacements": [
            {
                "original": r.original_word,
                "replacement": r.replacement_word,
                "pos": r.pos,
                "positions": list(r.positions),
            }
            for r in ex.replacements
        ],
        "degenerate": ex.degenerate,
    }


def read_negatives(path: str | Path) -> list[NegativeExample]:
    path = Path(path)
    out: list[NegativeExample] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                records = tuple(
                    ReplacementRecord(
                        original_word=r["original"],
                        replacement_word=r["replacement"],
                        pos=r["pos"],
                        positions=tuple(int(p) for p in r["positions"]),
                    )
                    for r in obj["replacements"]
                )
                out.append(
                    NegativeExample(
                        source_id=obj["source_id"],
                        text=obj["text"],
                        replacements=records,
                        degenerate=bool(obj["degenerate"]),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise DataError(f"{path}:{lineno}: bad negative-example record: {exc}") from exc
    return out
