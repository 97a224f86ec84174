"""Reader for the harness's exported dataset directories.

The adapter communicates with the main harness only through files: it
consumes the train/valid/test JSONL splits plus manifest.json, and emits
predictions JSONL scoreable by the harness's ``score-external`` command.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

__all__ = ["Example", "Dataset", "load_dataset", "write_predictions"]

_SPLIT_FILES = {"train": "train.jsonl", "validation": "valid.jsonl", "test": "test.jsonl"}

SINGLE_LABELS = ("nonjoke", "joke")
PAIR_LABELS = ("a", "b")


@dataclass(frozen=True)
class Example:
    id: str
    label: str
    text: str = ""
    text_a: str = ""
    text_b: str = ""


@dataclass(frozen=True)
class Dataset:
    task: str  # "single" | "pairwise"
    train: list
    validation: list
    test: list
    manifest: dict

    @property
    def labels(self) -> tuple[str, str]:
        return PAIR_LABELS if self.task == "pairwise" else SINGLE_LABELS


def load_dataset(directory: str | Path) -> Dataset:
    directory = Path(directory)
    manifest_path = directory / "manifest.json"
    if not manifest_path.exists():
        raise FileNotFoundError(f"no manifest.json in {directory}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    task = manifest.get("task")
    if task not in ("single", "pairwise"):
        raise ValueError(f"{manifest_path}: unknown task {task!r}")

    parts = {}
    for name, filename in _SPLIT_FILES.items():
        parts[name] = _read_split(directory / filename, task)
    return Dataset(task=task, manifest=manifest, **parts)


def _read_split(path: Path, task: str) -> list[Example]:
    examples = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                if task == "single":
                    examples.append(
                        Example(id=obj["id"], text=obj["text"], label=obj["label"])
                    )
                else:
                    examples.append(
                        Example(id=obj["id"], text_a=obj["text_a"],
                                text_b=obj["text_b"], label=obj["target"])
                    )
            except (json.JSONDecodeError, KeyError) as exc:
                raise ValueError(f"{path}:{lineno}: bad record: {exc}") from exc
    return examples


def write_predictions(path: str | Path, rows: list[dict]) -> None:
    """rows: [{"id", "pred", "score"}] in the external-predictor protocol."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")
