from .embeddings import EmbeddingMatrix, load_embeddings
from .gradcheck import gradient_check
from .models import (
    LSTM_HIDDEN_DIMS,
    EncoderConfig,
    NeuralTextClassifier,
    PairwiseNeuralClassifier,
    TrainConfig,
    load_model,
)
from .search import SearchSpace, TrialRecord, random_search, read_trials, write_trials

__all__ = [
    "EmbeddingMatrix",
    "load_embeddings",
    "gradient_check",
    "LSTM_HIDDEN_DIMS",
    "EncoderConfig",
    "TrainConfig",
    "NeuralTextClassifier",
    "PairwiseNeuralClassifier",
    "load_model",
    "SearchSpace",
    "TrialRecord",
    "random_search",
    "read_trials",
    "write_trials",
]
