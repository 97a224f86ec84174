"""Benchmark dataset assembly: ingestion, sampling, splits, JSONL exchange.

Single-task datasets pair jokes against one non-joke source (news,
proverbs, or generated negatives); the pairwise dataset pairs each joke
with its own generated negative.  Splits are stratified, seeded, and
balanced by downsampling the larger class within each split; everything
that influenced the result lands in the manifest.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from ._validation import check_ratios
from .dyntemplate import NegativeExample
from .errors import DataError
from .text import Document, make_document

__all__ = [
    "JOKE",
    "NONJOKE",
    "LabeledExample",
    "PairExample",
    "DatasetSplit",
    "ingest_corpus",
    "sample_uniform",
    "examples_from_documents",
    "examples_from_negatives",
    "assemble_binary",
    "assemble_pairwise",
    "export_jsonl",
    "import_jsonl",
    "write_documents",
    "read_documents",
]

logger = logging.getLogger(__name__)

JOKE = "joke"
NONJOKE = "nonjoke"

_SPLIT_FILES = {"train": "train.jsonl", "validation": "valid.jsonl", "test": "test.jsonl"}


@dataclass(frozen=True)
class LabeledExample:
    id: str
    text: str
    label: str  # "joke" | "nonjoke"
    source: str  # "jokes" | "news" | "proverbs" | "dyntemplate" | ...

    def __post_init__(self):
        if not self.text:
            raise ValueError(f"example {self.id}: empty text")
        if self.label not in (JOKE, NONJOKE):
            raise ValueError(f"example {self.id}: bad label {self.label!r}")


@dataclass(frozen=True)
class PairExample:
    id: str
    text_a: str
    text_b: str
    target: str  # "a" | "b": which side is the joke

    def __post_init__(self):
        if self.target not in ("a", "b"):
            raise ValueError(f"pair {self.id}: bad target {self.target!r}")


@dataclass
class DatasetSplit:
    train: list
    validation: list
    test: list
    manifest: dict

    def split(self, name: str) -> list:
        if name not in _SPLIT_FILES:
            raise ValueError(f"unknown split {name!r}")
        return getattr(self, "validation" if name == "validation" else name)

    def __eq__(self, other):
        if not isinstance(other, DatasetSplit):
            return NotImplemented
        return (
            self.train == other.train
            and self.validation == other.validation
            and self.test == other.test
            and self.manifest == other.manifest
        )


# -- ingestion and sampling -------------------------------------------------

def ingest_corpus(path: str | Path, source: str) -> list[Document]:
    """One document per non-blank line; exact duplicate lines are dropped.

    Document ids are ``<source>:<line-number>`` with 1-based numbering over
    the original file.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read corpus {path}: {exc}") from exc
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DataError(f"{path}: not valid UTF-8: {exc}") from exc

    documents: list[Document] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped in seen:
            continue
        seen.add(stripped)
        documents.append(make_document(f"{source}:{lineno}", stripped))
    if not documents:
        logger.warning("corpus %s produced 0 documents", path)
    return documents


def sample_uniform(documents: Sequence[Document], n: int, seed: int) -> list[Document]:
    """Uniform sample without replacement, deterministic under the seed."""
    if n > len(documents):
        raise ValueError(f"cannot sample {n} from {len(documents)} documents")
    return random.Random(seed).sample(list(documents), n)


# -- conversion to labeled examples ------------------------------------------

def examples_from_documents(documents: Iterable[Document], label: str, source: str) -> list[LabeledExample]:
    return [
        LabeledExample(id=d.id, text=d.raw_text, label=label, source=source)
        for d in documents
    ]


def examples_from_negatives(negatives: Iterable[NegativeExample]) -> tuple[list[LabeledExample], int]:
    """Convert generated negatives, dropping degenerates; returns (examples, dropped)."""
    out: list[LabeledExample] = []
    dropped = 0
    for neg in negatives:
        if neg.degenerate:
            dropped += 1
            continue
        out.append(
            LabeledExample(
                id=f"dyntemplate:{neg.source_id}",
                text=neg.text,
                label=NONJOKE,
                source="dyntemplate",
            )
        )
    return out, dropped


# -- splitting ---------------------------------------------------------------

def _split_indices(n: int, ratios: tuple[float, float, float], rng: random.Random):
    order = list(range(n))
    rng.shuffle(order)
    n_valid = int(ratios[1] * n)
    n_test = int(ratios[2] * n)
    n_train = n - n_valid - n_test
    return (
        order[:n_train],
        order[n_train : n_train + n_valid],
        order[n_train + n_valid :],
    )


def _source_group(example: LabeledExample) -> str:
    """Split-group key: a generated negative groups with its source joke.

    A dynamic-template negative is a near-duplicate of the joke it was
    generated from; letting the two land in different splits would leak
    test items into training (the same reason ingestion dedups lines).
    """
    if example.source == "dyntemplate" and example.id.startswith("dyntemplate:"):
        return example.id.removeprefix("dyntemplate:")
    return example.id


def assemble_binary(
    jokes: Sequence[LabeledExample],
    nonjokes: Sequence[LabeledExample],
    ratios: Sequence[float] = (0.7, 0.15, 0.15),
    seed: int = 1,
    excluded_degenerate: int = 0,
) -> DatasetSplit:
    """Stratified shuffle split, then per-split balancing by downsampling.

    A joke and the negative generated from it always land in the same
    split; the remaining examples of each side are split independently so
    label proportions carry over.  Within each split the larger side is
    then downsampled to the smaller side's count.  All counts land in the
    manifest.
    """
    ratios = check_ratios(ratios)
    if not jokes or not nonjokes:
        raise ValueError("both jokes and nonjokes must be non-empty")
    if any(e.label != JOKE for e in jokes):
        raise ValueError("jokes side contains non-joke labels")
    if any(e.label != NONJOKE for e in nonjokes):
        raise ValueError("nonjokes side contains joke labels")
    ids = [e.id for e in jokes] + [e.id for e in nonjokes]
    if len(set(ids)) != len(ids):
        raise DataError("duplicate example ids across the dataset")

    joke_ids = {e.id for e in jokes}
    paired_nonjokes = {
        _source_group(e): e for e in nonjokes if _source_group(e) in joke_ids
    }
    pairs = [(e, paired_nonjokes[e.id]) for e in jokes if e.id in paired_nonjokes]
    lone_jokes = [e for e in jokes if e.id not in paired_nonjokes]
    lone_nonjokes = [e for e in nonjokes if _source_group(e) not in joke_ids]

    rng = random.Random(seed)
    joke_parts: dict[str, list[LabeledExample]] = {n: [] for n in _SPLIT_FILES}
    nonjoke_parts: dict[str, list[LabeledExample]] = {n: [] for n in _SPLIT_FILES}
    for part_name, idx in zip(_SPLIT_FILES, _split_indices(len(pairs), ratios, rng)):
        for i in idx:
            joke_parts[part_name].append(pairs[i][0])
            nonjoke_parts[part_name].append(pairs[i][1])
    for side, parts in ((lone_jokes, joke_parts), (lone_nonjokes, nonjoke_parts)):
        for part_name, idx in zip(_SPLIT_FILES, _split_indices(len(side), ratios, rng)):
            parts[part_name].extend(side[i] for i in idx)

    splits: dict[str, list[LabeledExample]] = {}
    downsampled = {}
    for name in _SPLIT_FILES:
        joke_part, nonjoke_part = joke_parts[name], nonjoke_parts[name]
        k = min(len(joke_part), len(nonjoke_part))
        kept_jokes = joke_part if len(joke_part) == k else rng.sample(joke_part, k)
        kept_non = nonjoke_part if len(nonjoke_part) == k else rng.sample(nonjoke_part, k)
        downsampled[name] = {
            JOKE: len(joke_part) - k,
            NONJOKE: len(nonjoke_part) - k,
        }
        merged = list(kept_jokes) + list(kept_non)
        rng.shuffle(merged)
        splits[name] = merged

    manifest = {
        "task": "single",
        "seed": seed,
        "ratios": list(ratios),
        "counts": _count_manifest(splits),
        "excluded_degenerate": excluded_degenerate,
        "paired_groups": len(pairs),
        "downsampled": downsampled,
    }
    return DatasetSplit(
        train=splits["train"],
        validation=splits["validation"],
        test=splits["test"],
        manifest=manifest,
    )


def assemble_pairwise(
    jokes: Sequence[Document],
    negatives: Sequence[NegativeExample],
    ratios: Sequence[float] = (0.7, 0.15, 0.15),
    seed: int = 1,
) -> DatasetSplit:
    """Pair each joke with its own generated negative.

    Degenerate negatives drop their pair.  Sides are assigned by a fair
    seeded coin and the split is stratified by target side, keyed on the
    source joke id so no joke text spans two splits.
    """
    ratios = check_ratios(ratios)
    by_source = {}
    for neg in negatives:
        if neg.source_id in by_source:
            raise DataError(f"duplicate negative for source id {neg.source_id}")
        by_source[neg.source_id] = neg
    missing = [d.id for d in jokes if d.id not in by_source]
    if missing:
        raise DataError(
            "missing negative counterparts for joke ids: " + _preview(missing)
        )

    rng = random.Random(seed)
    pairs: list[PairExample] = []
    dropped = 0
    for joke in jokes:
        neg = by_source[joke.id]
        if neg.degenerate:
            dropped += 1
            continue
        joke_side = "a" if rng.random() < 0.5 else "b"
        if joke_side == "a":
            pair = PairExample(
                id=f"pair:{joke.id}", text_a=joke.raw_text, text_b=neg.text, target="a"
            )
        else:
            pair = PairExample(
                id=f"pair:{joke.id}", text_a=neg.text, text_b=joke.raw_text, target="b"
            )
        pairs.append(pair)

    splits = {"train": [], "validation": [], "test": []}
    for side in ("a", "b"):
        group = [p for p in pairs if p.target == side]
        idx = _split_indices(len(group), ratios, rng)
        for name, part in zip(("train", "validation", "test"), idx):
            splits[name].extend(group[i] for i in part)
    for part in splits.values():
        rng.shuffle(part)

    manifest = {
        "task": "pairwise",
        "seed": seed,
        "ratios": list(ratios),
        "counts": _count_manifest(splits),
        "excluded_degenerate": dropped,
    }
    return DatasetSplit(
        train=splits["train"],
        validation=splits["validation"],
        test=splits["test"],
        manifest=manifest,
    )


def _count_manifest(splits: dict[str, list]) -> dict:
    counts = {}
    for name, examples in splits.items():
        entry: dict[str, int | dict] = {"total": len(examples)}
        if examples and isinstance(examples[0], LabeledExample):
            by_label: dict[str, int] = {}
            by_source: dict[str, int] = {}
            for e in examples:
                by_label[e.label] = by_label.get(e.label, 0) + 1
                by_source[e.source] = by_source.get(e.source, 0) + 1
            entry["by_label"] = by_label
            entry["by_source"] = by_source
        elif examples and isinstance(examples[0], PairExample):
            by_target: dict[str, int] = {}
            for e in examples:
                by_target[e.target] = by_target.get(e.target, 0) + 1
            entry["by_target"] = by_target
        counts[name] = entry
    return counts


def _preview(items: Sequence[str], limit: int = 5) -> str:
    shown = ", ".join(sorted(items)[:limit])
    extra = len(items) - min(len(items), limit)
    return shown + (f" (+{extra} more)" if extra else "")


# -- JSONL exchange -----------------------------------------------------------

def export_jsonl(split: DatasetSplit, directory: str | Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, filename in _SPLIT_FILES.items():
        with open(directory / filename, "w", encoding="utf-8") as fh:
            for ex in split.split(name):
                fh.write(json.dumps(_example_to_obj(ex), ensure_ascii=False, sort_keys=True))
                fh.write("\n")
    with open(directory / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(split.manifest, fh, ensure_ascii=False, sort_keys=True, indent=2)
        fh.write("\n")


def _example_to_obj(ex) -> dict:
    if isinstance(ex, LabeledExample):
        return {"id": ex.id, "text": ex.text, "label": ex.label, "source": ex.source}
    if isinstance(ex, PairExample):
        return {"id": ex.id, "text_a": ex.text_a, "text_b": ex.text_b, "target": ex.target}
    raise TypeError(f"cannot serialize {type(ex).__name__}")


def import_jsonl(directory: str | Path) -> DatasetSplit:
    directory = Path(directory)
    manifest_path = directory / "manifest.json"
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read {manifest_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{manifest_path}: invalid JSON: {exc}") from exc
    task = manifest.get("task")
    if task not in ("single", "pairwise"):
        raise DataError(f"{manifest_path}: unknown task {task!r}")

    parts = {}
    for name, filename in _SPLIT_FILES.items():
        parts[name] = _read_examples(directory / filename, task)
    return DatasetSplit(
        train=parts["train"],
        validation=parts["validation"],
        test=parts["test"],
        manifest=manifest,
    )


def _read_examples(path: Path, task: str) -> list:
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    out = []
    with fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            try:
                if task == "single":
                    out.append(
                        LabeledExample(
                            id=obj["id"], text=obj["text"],
                            label=obj["label"], source=obj["source"],
                        )
                    )
                else:
                    out.append(
                        PairExample(
                            id=obj["id"], text_a=obj["text_a"],
                            text_b=obj["text_b"], target=obj["target"],
                        )
                    )
            except (KeyError, TypeError, ValueError) as exc:
                raise DataError(f"{path}:{lineno}: bad example record: {exc}") from exc
    return out


# -- plain document files ------------------------------------------------------

def write_documents(path: str | Path, documents: Sequence[Document]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in documents:
            fh.write(json.dumps({"id": doc.id, "text": doc.raw_text},
                                ensure_ascii=False, sort_keys=True))
            fh.write("\n")


def read_documents(path: str | Path) -> list[Document]:
    path = Path(path)
    out: list[Document] = []
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read documents file {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                out.append(make_document(obj["id"], obj["text"]))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise DataError(f"{path}:{lineno}: bad document record: {exc}") from exc
    return out
