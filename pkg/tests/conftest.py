from __future__ import annotations

import pytest

import synthdata
from mirth.datasets import ingest_corpus
from mirth.dyntemplate import DTParams, generate_negative_corpus
from mirth.neural.embeddings import load_embeddings
from mirth.tagger import PerceptronTagger, read_conllu

# Sizes for the full-scale acceptance runs (>= 2000 items per side; the
# joke count mirrors the benchmark's corpus size).
N_JOKES = 3235
N_NEWS_POOL = 8000


@pytest.fixture(scope="session")
def synth_paths(tmp_path_factory):
    root = tmp_path_factory.mktemp("synth")
    paths = {
        "jokes": root / "jokes.txt",
        "news": root / "news.txt",
        "proverbs": root / "proverbs.txt",
        "embeddings": root / "embeddings.vec",
        "conllu": root / "tagged.conllu",
    }
    synthdata.write_lines(paths["jokes"], synthdata.make_jokes(N_JOKES))
    synthdata.write_lines(paths["news"], synthdata.make_news(N_NEWS_POOL))
    synthdata.write_lines(paths["proverbs"], synthdata.make_proverbs(400))
    synthdata.write_embeddings(paths["embeddings"])
    paths["conllu"].write_text(synthdata.make_conllu(), encoding="utf-8")
    return paths


@pytest.fixture(scope="session")
def trained_tagger(synth_paths):
    sentences = read_conllu(synth_paths["conllu"])
    return PerceptronTagger(epochs=5, seed=1).fit(sentences)


@pytest.fixture(scope="session")
def joke_documents(synth_paths):
    return ingest_corpus(synth_paths["jokes"], "jokes")


@pytest.fixture(scope="session")
def news_documents(synth_paths):
    return ingest_corpus(synth_paths["news"], "news")


@pytest.fixture(scope="session")
def embeddings(synth_paths):
    return load_embeddings(synth_paths["embeddings"], oov_policy="zero")


@pytest.fixture(scope="session")
def negatives(joke_documents, trained_tagger):
    return generate_negative_corpus(joke_documents, trained_tagger, DTParams(rng_seed=11))
