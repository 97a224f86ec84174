"""Command-line front door for reproducible experiment runs.

Every subcommand is file-in/file-out, never mutates its inputs, and
writes the exact invocation parameters next to its artifacts, so a run
directory is always self-describing and reruns are byte-identical.

Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime failure.
All flags can also be set through environment variables with the
``MIRTH_`` prefix (e.g. ``MIRTH_INGEST_SOURCE``).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import __version__
from .datasets import (
    assemble_binary,
    assemble_pairwise,
    examples_from_documents,
    examples_from_negatives,
    export_jsonl,
    import_jsonl,
    ingest_corpus,
    read_documents,
    write_documents,
)
from .dyntemplate import DTParams, generate_negative_corpus, read_negatives, write_negatives
from .errors import DataError, MirthError
from .evaluation import (
    cross_domain_rate,
    evaluate,
    expected_max_curve,
    score_external,
)
from .nb import MultinomialNaiveBayes, TfidfNgramVectorizer, load_nb_model, save_nb_model
from .neural import (
    NeuralTextClassifier,
    PairwiseNeuralClassifier,
    load_embeddings,
    load_model,
    random_search,
    write_trials,
)
from .tagger import PerceptronTagger, read_conllu

_NB_FILE = "model.nb"
_NN_FILE = "model.nn"


# -- small helpers -------------------------------------------------------------


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, ensure_ascii=False, sort_keys=True, indent=2)
        fh.write("\n")


def _write_run_config(out_dir: Path, command: str, params: dict) -> None:
    config = {
        "command": command,
        "version": __version__,
        "params": {k: (str(v) if isinstance(v, Path) else v) for k, v in params.items()},
    }
    _write_json(out_dir / "run_config.json", config)


def _parse_ratios(value: str) -> tuple[float, float, float]:
    try:
        parts = tuple(float(p) for p in value.split(","))
    except ValueError as exc:
        raise click.BadParameter(f"cannot parse ratios {value!r}") from exc
    if len(parts) != 3:
        raise click.BadParameter("ratios need exactly three comma-separated values")
    return parts


def _read_nonjokes(path: Path):
    """A nonjoke file is either documents JSONL or generated negatives JSONL."""
    with open(path, encoding="utf-8") as fh:
        first = ""
        for line in fh:
            if line.strip():
                first = line
                break
    try:
        keys = set(json.loads(first)) if first else set()
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}:1: not JSONL: {exc}") from exc
    if "source_id" in keys:
        return "negatives", read_negatives(path)
    return "documents", read_documents(path)


def _find_model(model_dir: Path):
    nb_path = model_dir / _NB_FILE
    nn_path = model_dir / _NN_FILE
    if nb_path.exists():
        return ("nb", *load_nb_model(nb_path))
    if nn_path.exists():
        return ("nn", load_model(nn_path))
    raise DataError(f"no {_NB_FILE} or {_NN_FILE} found in {model_dir}")


def _predict_split(model_info, examples):
    kind = model_info[0]
    if not examples:
        raise DataError("split is empty")
    pairwise = hasattr(examples[0], "text_a")
    if kind == "nb":
        if pairwise:
            raise DataError("the token-feature baseline has no pairwise mode")
        _, vec, clf = model_info
        labels = clf.predict(vec.transform([e.text for e in examples]))
    else:
        model = model_info[1]
        if pairwise != isinstance(model, PairwiseNeuralClassifier):
            raise DataError("model task does not match the dataset task")
        inputs = (
            [(e.text_a, e.text_b) for e in examples] if pairwise
            else [e.text for e in examples]
        )
        labels = model.predict(inputs)
    return {e.id: lab for e, lab in zip(examples, labels)}


# -- command group ----------------------------------------------------------------


@click.group()
@click.version_option(__version__)
def cli():
    """Humor-detection benchmark harness."""


@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path(path_type=Path),
              help="UTF-8 text file, one item per line.")
@click.option("--source", required=True, help="Source name used in document ids.")
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
def ingest(in_path: Path, source: str, out_dir: Path):
    """Read a corpus file into deduplicated documents."""
    documents = ingest_corpus(in_path, source)
    raw = in_path.read_text(encoding="utf-8")
    non_blank = sum(1 for line in raw.splitlines() if line.strip())
    out_dir.mkdir(parents=True, exist_ok=True)
    write_documents(out_dir / "documents.jsonl", documents)
    _write_json(out_dir / "manifest.json", {
        "source": source,
        "count": len(documents),
        "duplicates_removed": non_blank - len(documents),
    })
    _write_run_config(out_dir, "ingest",
                      {"in": in_path, "source": source, "out": out_dir})
    click.echo(f"ingested {len(documents)} documents from {in_path}")


@cli.command("train-tagger")
@click.option("--conllu", "conllu_path", required=True, type=click.Path(path_type=Path))
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
@click.option("--epochs", default=5, show_default=True)
@click.option("--seed", default=1, show_default=True)
def train_tagger(conllu_path: Path, out_path: Path, epochs: int, seed: int):
    """Train the averaged-perceptron POS tagger from a CoNLL-U file."""
    sentences = read_conllu(conllu_path)
    tagger = PerceptronTagger(epochs=epochs, seed=seed).fit(sentences)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    tagger.save(out_path)
    click.echo(f"trained tagger on {len(sentences)} sentences -> {out_path}")


@cli.command()
@click.option("--model", "model_path", required=True, type=click.Path(path_type=Path))
@click.option("--in", "in_path", required=True, type=click.Path(path_type=Path),
              help="Documents JSONL or plain text, one item per line.")
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
def tag(model_path: Path, in_path: Path, out_path: Path):
    """Tag a corpus; writes JSONL with (surface, tag) pairs per document."""
    tagger = PerceptronTagger.load(model_path)
    try:
        documents = read_documents(in_path)
    except DataError:
        documents = ingest_corpus(in_path, in_path.stem)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8") as fh:
        for doc in documents:
            tagged = tagger.predict(doc.tokens)
            obj = {"id": doc.id,
                   "tags": [[tt.token.surface, tt.pos] for tt in tagged]}
            fh.write(json.dumps(obj, ensure_ascii=False, sort_keys=True) + "\n")
    click.echo(f"tagged {len(documents)} documents -> {out_path}")


@cli.command("generate-negatives")
@click.option("--jokes", "jokes_path", required=True, type=click.Path(path_type=Path),
              help="Documents JSONL produced by ingest.")
@click.option("--tagger", "tagger_path", required=True, type=click.Path(path_type=Path))
@click.option("--seed", default=1, show_default=True)
@click.option("--percentile", default=0.62, show_default=True,
              help="Maximum corpus-frequency percentile for replaceable words.")
@click.option("--chars-per-repl", default=25, show_default=True,
              help="One replacement at least every this many characters.")
@click.option("--context", default=3, show_default=True,
              help="Number of context jokes sampled for the word pool.")
@click.option("--resamples", default=5, show_default=True,
              help="Pool resamples before a slot is skipped.")
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
def generate_negatives(jokes_path: Path, tagger_path: Path, seed: int,
                       percentile: float, chars_per_repl: int, context: int,
                       resamples: int, out_path: Path):
    """Generate one template-substituted non-joke per joke."""
    documents = read_documents(jokes_path)
    if not documents:
        raise DataError(f"{jokes_path}: no documents")
    tagger = PerceptronTagger.load(tagger_path)
    params = DTParams(
        max_freq_percentile=percentile,
        chars_per_replacement=chars_per_repl,
        context_sample_size=context,
        max_context_resamples=resamples,
        rng_seed=seed,
    )
    negatives = generate_negative_corpus(documents, tagger, params)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_negatives(out_path, negatives)
    degenerate = sum(n.degenerate for n in negatives)
    _write_json(Path(str(out_path) + ".manifest.json"), {
        "count": len(negatives),
        "degenerate": degenerate,
        "degenerate_fraction": degenerate / len(negatives),
        "params": {
            "max_freq_percentile": percentile,
            "chars_per_replacement": chars_per_repl,
            "context_sample_size": context,
            "max_context_resamples": resamples,
            "rng_seed": seed,
        },
    })
    click.echo(
        f"generated {len(negatives)} negatives ({degenerate} degenerate) -> {out_path}"
    )


@cli.command("make-dataset")
@click.option("--jokes", "jokes_path", required=True, type=click.Path(path_type=Path))
@click.option("--nonjokes", "nonjokes_path", required=True,
              type=click.Path(path_type=Path),
              help="Documents JSONL (news/proverbs) or negatives JSONL (dyntemplate).")
@click.option("--task", type=click.Choice(["single", "pairwise"]), default="single",
              show_default=True)
@click.option("--seed", default=1, show_default=True)
@click.option("--ratios", default="0.7,0.15,0.15", show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
def make_dataset(jokes_path: Path, nonjokes_path: Path, task: str, seed: int,
                 ratios: str, out_dir: Path):
    """Assemble train/valid/test splits for a single or pairwise task."""
    ratio_triple = _parse_ratios(ratios)
    jokes = read_documents(jokes_path)
    kind, nonjokes = _read_nonjokes(nonjokes_path)
    if task == "pairwise":
        if kind != "negatives":
            raise DataError("pairwise datasets require generated negatives as nonjokes")
        split = assemble_pairwise(jokes, nonjokes, ratios=ratio_triple, seed=seed)
    else:
        joke_examples = examples_from_documents(jokes, "joke", "jokes")
        if kind == "negatives":
            nonjoke_examples, dropped = examples_from_negatives(nonjokes)
        else:
            source = nonjokes[0].id.split(":", 1)[0] if nonjokes else "nonjokes"
            nonjoke_examples = examples_from_documents(nonjokes, "nonjoke", source)
            dropped = 0
        split = assemble_binary(joke_examples, nonjoke_examples, ratios=ratio_triple,
                                seed=seed, excluded_degenerate=dropped)
    export_jsonl(split, out_dir)
    _write_run_config(out_dir, "make-dataset", {
        "jokes": jokes_path, "nonjokes": nonjokes_path, "task": task,
        "seed": seed, "ratios": ratios, "out": out_dir,
    })
    counts = {name: split.manifest["counts"][name]["total"]
              for name in ("train", "validation", "test")}
    click.echo(f"dataset written to {out_dir}: {counts}")


def _load_neural_data(split, task):
    if task == "pairwise":
        to_x = lambda exs: [(e.text_a, e.text_b) for e in exs]
        to_y = lambda exs: [e.target for e in exs]
    else:
        to_x = lambda exs: [e.text for e in exs]
        to_y = lambda exs: [e.label for e in exs]
    return (
        (to_x(split.train), to_y(split.train)),
        (to_x(split.validation), to_y(split.validation)),
    )


@cli.command()
@click.option("--model", "model_kind", required=True,
              type=click.Choice(["nb", "cnn", "lstm"]))
@click.option("--data", "data_dir", required=True, type=click.Path(path_type=Path))
@click.option("--task", type=click.Choice(["single", "pairwise"]), default=None,
              help="Defaults to the dataset manifest's task.")
@click.option("--embeddings", "embeddings_path", type=click.Path(path_type=Path),
              default=None, help="Required for cnn/lstm.")
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@click.option("--learning-rate", default=1e-3, show_default=True)
@click.option("--hidden-dim", default=32, show_default=True)
@click.option("--epochs", default=15, show_default=True)
@click.option("--batch-size", default=64, show_default=True)
@click.option("--dropout", default=0.1, show_default=True)
@click.option("--seed", default=1, show_default=True)
@click.option("--max-seq-len", default=64, show_default=True)
@click.option("--alpha", default=1.0, show_default=True,
              help="Additive smoothing for the nb baseline.")
def train(model_kind: str, data_dir: Path, task: str | None, embeddings_path,
          out_dir: Path, learning_rate: float, hidden_dim: int, epochs: int,
          batch_size: int, dropout: float, seed: int, max_seq_len: int, alpha: float):
    """Train one classifier on an assembled dataset."""
    split = import_jsonl(data_dir)
    data_task = split.manifest.get("task", "single")
    if task is not None and task != data_task:
        raise DataError(f"dataset at {data_dir} is a {data_task} task, not {task}")
    task = data_task
    out_dir.mkdir(parents=True, exist_ok=True)

    if model_kind == "nb":
        if task == "pairwise":
            raise click.UsageError("the nb baseline supports only the single task")
        texts = [e.text for e in split.train]
        labels = [e.label for e in split.train]
        vec = TfidfNgramVectorizer().fit(texts)
        clf = MultinomialNaiveBayes(alpha=alpha, tie_break="nonjoke").fit(
            vec.transform(texts), labels
        )
        save_nb_model(out_dir / _NB_FILE, vec, clf)
        preds = clf.predict(vec.transform([e.text for e in split.validation]))
        val_acc = sum(p == e.label for p, e in zip(preds, split.validation)) / len(
            split.validation
        )
        metrics = {"validation_accuracy": val_acc}
    else:
        if embeddings_path is None:
            raise click.UsageError("--embeddings is required for cnn/lstm models")
        emb = load_embeddings(embeddings_path)
        (x_train, y_train), valid = _load_neural_data(split, task)
        cls = PairwiseNeuralClassifier if task == "pairwise" else NeuralTextClassifier
        model = cls(
            encoder=model_kind, embeddings=emb, hidden_dim=hidden_dim,
            learning_rate=learning_rate, epochs=epochs, batch_size=batch_size,
            dropout=dropout, seed=seed, max_sequence_length=max_seq_len,
        )
        model.fit(x_train, y_train, validation_data=valid)
        model.save(out_dir / _NN_FILE)
        metrics = {
            "validation_accuracy": model.best_val_accuracy_,
            "best_epoch": model.best_epoch_,
            "history": model.history_,
            "truncation_counts": model.truncation_counts_,
        }

    _write_json(out_dir / "metrics.json", metrics)
    _write_run_config(out_dir, "train", {
        "model": model_kind, "data": data_dir, "task": task,
        "embeddings": embeddings_path, "out": out_dir,
        "learning_rate": learning_rate, "hidden_dim": hidden_dim,
        "epochs": epochs, "batch_size": batch_size, "dropout": dropout,
        "seed": seed, "max_seq_len": max_seq_len, "alpha": alpha,
    })
    click.echo(f"validation accuracy {metrics['validation_accuracy']:.4f} -> {out_dir}")


@cli.command()
@click.option("--model", "model_kind", required=True, type=click.Choice(["cnn", "lstm"]))
@click.option("--data", "data_dir", required=True, type=click.Path(path_type=Path))
@click.option("--embeddings", "embeddings_path", required=True,
              type=click.Path(path_type=Path))
@click.option("--trials", default=10, show_default=True)
@click.option("--seed", default=1, show_default=True)
@click.option("--epochs", default=15, show_default=True)
@click.option("--max-seq-len", default=64, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
def search(model_kind: str, data_dir: Path, embeddings_path: Path, trials: int,
           seed: int, epochs: int, max_seq_len: int, out_dir: Path):
    """Random hyperparameter search; emits trials, the expected-max curve,
    and the selected model."""
    split = import_jsonl(data_dir)
    emb = load_embeddings(embeddings_path)
    records, best = random_search(
        model_kind, split, emb, n_trials=trials, base_seed=seed,
        epochs=epochs, max_sequence_length=max_seq_len,
    )
    out_dir.mkdir(parents=True, exist_ok=True)
    write_trials(out_dir / "trials.jsonl", records)
    accs = [r.validation_accuracy for r in records if r.status == "ok"]
    if accs:
        curve = expected_max_curve(accs, max_n=trials)
        (out_dir / "curve.csv").write_text(curve.to_csv(), encoding="utf-8")
    if best is not None:
        best.save(out_dir / _NN_FILE)
    _write_run_config(out_dir, "search", {
        "model": model_kind, "data": data_dir, "embeddings": embeddings_path,
        "trials": trials, "seed": seed, "epochs": epochs,
        "max_seq_len": max_seq_len, "out": out_dir,
    })
    ok = sum(1 for r in records if r.status == "ok")
    click.echo(f"{ok}/{trials} trials succeeded -> {out_dir}")


@cli.command("eval")
@click.option("--model-dir", "model_dir", required=True, type=click.Path(path_type=Path))
@click.option("--data", "data_dir", required=True, type=click.Path(path_type=Path))
@click.option("--split", "split_name", default="test", show_default=True,
              type=click.Choice(["train", "validation", "test"]))
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None)
def eval_command(model_dir: Path, data_dir: Path, split_name: str, out_path):
    """Evaluate a trained model on one dataset split."""
    split = import_jsonl(data_dir)
    examples = split.split(split_name)
    model_info = _find_model(model_dir)
    preds = _predict_split(model_info, examples)
    report = evaluate(preds, examples)
    click.echo(json.dumps(report.to_dict(), ensure_ascii=False, sort_keys=True, indent=2))
    click.echo(report.to_text(), err=True)
    if out_path is not None:
        _write_json(Path(out_path), report.to_dict())


@cli.command("cross-domain")
@click.option("--model-dir", "model_dir", required=True, type=click.Path(path_type=Path))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(path_type=Path))
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None)
def cross_domain(model_dir: Path, corpus_path: Path, out_path):
    """Fraction of an out-of-domain corpus the model labels as a joke."""
    documents = read_documents(corpus_path)
    model_info = _find_model(model_dir)
    if model_info[0] == "nb":
        _, vec, clf = model_info
        predict = lambda texts: clf.predict(vec.transform(texts))
    else:
        model = model_info[1]
        if isinstance(model, PairwiseNeuralClassifier):
            raise DataError("cross-domain rates need a single-task model")
        predict = model.predict
    report = cross_domain_rate(predict, documents)
    click.echo(json.dumps(report.to_dict(), ensure_ascii=False, sort_keys=True, indent=2))
    if out_path is not None:
        _write_json(Path(out_path), report.to_dict())


@cli.command("score-external")
@click.option("--preds", "preds_path", required=True, type=click.Path(path_type=Path))
@click.option("--data", "data_dir", required=True, type=click.Path(path_type=Path))
@click.option("--split", "split_name", default="test", show_default=True,
              type=click.Choice(["train", "validation", "test"]))
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None)
def score_external_command(preds_path: Path, data_dir: Path, split_name: str, out_path):
    """Score a predictions file from an out-of-process model."""
    split = import_jsonl(data_dir)
    examples = split.split(split_name)
    report = score_external(preds_path, examples, task=split.manifest.get("task", "single"))
    click.echo(json.dumps(report.to_dict(), ensure_ascii=False, sort_keys=True, indent=2))
    if out_path is not None:
        _write_json(Path(out_path), report.to_dict())


def main(argv=None) -> None:
    try:
        cli.main(args=argv, standalone_mode=False, auto_envvar_prefix="MIRTH")
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.UsageError as exc:
        exc.show()
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        sys.exit(2)
    except MirthError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    except (OSError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)


if __name__ == "__main__":
    main()
