"""mirth: a humor-detection benchmark harness.

Builds hard negative examples by imitating a joke corpus with dynamic
templates, assembles single and pairwise detection datasets, and trains
and evaluates token-based and neural classifiers under seeded,
reproducible runs.
"""

from .dyntemplate import (
    DTParams,
    DynamicTemplateGenerator,
    NegativeExample,
    generate_negative,
    generate_negative_corpus,
)
from .errors import DataError, MirthError, TrainingDiverged
from .nb import MultinomialNaiveBayes, TfidfNgramVectorizer
from .tagger import PerceptronTagger
from .text import Document, FrequencyTable, Token, build_frequency_table, make_document, tokenize

__version__ = "0.1.0"

__all__ = [
    "DTParams",
    "DynamicTemplateGenerator",
    "NegativeExample",
    "generate_negative",
    "generate_negative_corpus",
    "DataError",
    "MirthError",
    "TrainingDiverged",
    "MultinomialNaiveBayes",
    "TfidfNgramVectorizer",
    "PerceptronTagger",
    "Document",
    "FrequencyTable",
    "Token",
    "build_frequency_table",
    "make_document",
    "tokenize",
    "__version__",
]
