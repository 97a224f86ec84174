"""CNN and LSTM text classifiers over pretrained word embeddings.

Both the single-text and the pairwise (which-side-is-the-joke) models are
trained with hand-written backpropagation, the adaptive-moment optimizer,
per-step global gradient clipping, and seeded shuffling, so runs are
bit-reproducible on one machine.  Checkpoints are a binary-free text
format ("MIRTH-NN v1") holding every tensor as decimal rows.

Architecture, per the benchmark recipe: the CNN encoder is two width-3
convolutions with ReLU and a global max pool over real tokens; the LSTM
encoder is a single layer whose hidden state at the last real token is
the sequence encoding.  Single task: encoder -> dropout -> affine ->
2-way softmax.  Pairwise: two encoders with separate parameters over a
shared (trainable) embedding table, concatenated before the head.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .._validation import check_texts
from ..errors import DataError, TrainingDiverged
from ..text import tokenize
from .embeddings import OOV_ID, PAD_ID, EmbeddingMatrix
from . import ops
from .train import Adam, clip_global_norm

__all__ = [
    "LSTM_HIDDEN_DIMS",
    "EncoderConfig",
    "TrainConfig",
    "NeuralTextClassifier",
    "PairwiseNeuralClassifier",
    "load_model",
]

logger = logging.getLogger(__name__)

LSTM_HIDDEN_DIMS = (8, 16, 32, 64, 128)

_SINGLE_CLASSES = ("nonjoke", "joke")  # class index 1 is the positive JOKE label
_PAIR_CLASSES = ("a", "b")


@dataclass(frozen=True)
class EncoderConfig:
    kind: str  # "cnn" | "lstm"
    hidden_dim: int = 32
    conv_channels: tuple[int, int] = (64, 64)
    kernel_size: int = 3
    pooling: str = "max"
    nonlinearity: str = "relu"

    def __post_init__(self):
        if self.kind not in ("cnn", "lstm"):
            raise ValueError(f"encoder kind must be 'cnn' or 'lstm', got {self.kind!r}")
        if self.kind == "lstm" and self.hidden_dim not in LSTM_HIDDEN_DIMS:
            raise ValueError(
                f"lstm hidden_dim must be one of {LSTM_HIDDEN_DIMS}, got {self.hidden_dim}"
            )
        if self.kind == "cnn":
            if len(self.conv_channels) != 2:
                raise ValueError("the benchmark CNN has exactly two convolutional layers")
            if self.kernel_size != 3:
                raise ValueError("the benchmark CNN uses kernel size 3")
            if self.pooling != "max":
                raise ValueError("the benchmark CNN uses max pooling")

    @property
    def output_dim(self) -> int:
        return self.conv_channels[-1] if self.kind == "cnn" else self.hidden_dim


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    epochs: int = 15
    batch_size: int = 64
    dropout: float = 0.1
    grad_clip_norm: float = 1.0
    adam_epsilon: float = 1e-8
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    seed: int = 1
    max_sequence_length: int = 64

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")
        if self.epochs < 1 or self.batch_size < 1 or self.max_sequence_length < 1:
            raise ValueError("epochs, batch_size and max_sequence_length must be >= 1")


def _glorot(rng: np.random.Generator, fan_in: int, fan_out: int, shape) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def _init_encoder_params(rng, prefix: str, cfg: EncoderConfig, dim: int) -> dict:
    params = {}
    if cfg.kind == "cnn":
        c1, c2 = cfg.conv_channels
        k = cfg.kernel_size
        params[f"{prefix}W1"] = _glorot(rng, k * dim, c1, (k * dim, c1))
        params[f"{prefix}b1"] = np.zeros(c1, dtype=np.float64)
        params[f"{prefix}W2"] = _glorot(rng, k * c1, c2, (k * c1, c2))
        params[f"{prefix}b2"] = np.zeros(c2, dtype=np.float64)
    else:
        h = cfg.hidden_dim
        params[f"{prefix}Wx"] = _glorot(rng, dim, 4 * h, (dim, 4 * h))
        params[f"{prefix}Wh"] = _glorot(rng, h, 4 * h, (h, 4 * h))
        b = np.zeros(4 * h, dtype=np.float64)
        b[h : 2 * h] = 1.0  # forget-gate bias
        params[f"{prefix}b"] = b
    return params


def _encoder_forward(params: dict, prefix: str, cfg: EncoderConfig,
                     x: np.ndarray, mask: np.ndarray):
    if cfg.kind == "cnn":
        c1, cache1 = ops.conv1d_forward(x, params[f"{prefix}W1"], params[f"{prefix}b1"],
                                        cfg.kernel_size)
        r1, rc1 = ops.relu_forward(c1)
        c2, cache2 = ops.conv1d_forward(r1, params[f"{prefix}W2"], params[f"{prefix}b2"],
                                        cfg.kernel_size)
        r2, rc2 = ops.relu_forward(c2)
        out, pc = ops.masked_maxpool_forward(r2, mask)
        return out, ("cnn", cache1, rc1, cache2, rc2, pc)
    h, cache = ops.lstm_forward(x, mask, params[f"{prefix}Wx"], params[f"{prefix}Wh"],
                                params[f"{prefix}b"])
    return h, ("lstm", cache)


def _encoder_backward(dout: np.ndarray, enc_cache, prefix: str):
    kind = enc_cache[0]
    grads = {}
    if kind == "cnn":
        _, cache1, rc1, cache2, rc2, pc = enc_cache
        dr2 = ops.masked_maxpool_backward(dout, pc)
        dc2 = ops.relu_backward(dr2, rc2)
        dr1, dW2, db2 = ops.conv1d_backward(dc2, cache2)
        dc1 = ops.relu_backward(dr1, rc1)
        dx, dW1, db1 = ops.conv1d_backward(dc1, cache1)
        grads[f"{prefix}W1"] = dW1
        grads[f"{prefix}b1"] = db1
        grads[f"{prefix}W2"] = dW2
        grads[f"{prefix}b2"] = db2
        return dx, grads
    _, cache = enc_cache
    dx, dWx, dWh, db = ops.lstm_backward(dout, cache)
    grads[f"{prefix}Wx"] = dWx
    grads[f"{prefix}Wh"] = dWh
    grads[f"{prefix}b"] = db
    return dx, grads


class _NeuralBase(BaseEstimator):
    """Shared machinery: text encoding, the training loop, persistence."""

    _task: str  # "single" | "pairwise"
    _classes: tuple[str, str]

    # Subclasses define __init__ with explicit sklearn-style parameters.

    def _encoder_config(self) -> EncoderConfig:
        return EncoderConfig(
            kind=self.encoder,
            hidden_dim=self.hidden_dim,
            conv_channels=tuple(self.conv_channels),
        )

    def _train_config(self) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            batch_size=self.batch_size,
            dropout=self.dropout,
            grad_clip_norm=self.grad_clip_norm,
            adam_epsilon=self.adam_epsilon,
            adam_beta1=self.adam_beta1,
            adam_beta2=self.adam_beta2,
            seed=self.seed,
            max_sequence_length=self.max_sequence_length,
        )

    # -- text -> index arrays ------------------------------------------------

    def _require_embeddings(self) -> EmbeddingMatrix:
        if self.embeddings is None:
            raise ValueError("this classifier requires an EmbeddingMatrix")
        return self.embeddings

    def _texts_to_ids(self, texts: Sequence[str]) -> tuple[np.ndarray, int]:
        emb = self._require_embeddings()
        T = self.max_sequence_length
        ids = np.full((len(texts), T), PAD_ID, dtype=np.int64)
        truncated = 0
        for row, text in enumerate(texts):
            words = [t.normalized for t in tokenize(text)]
            if len(words) > T:
                truncated += 1
                words = words[:T]
            ids[row, : len(words)] = emb.lookup_ids(words)
        return ids, truncated

    def _embed(self, params: dict, ids: np.ndarray):
        emb = self._require_embeddings()
        matrix = params["emb"] if self.trainable_embeddings else emb.matrix
        return ops.embed_forward(ids, matrix, emb.oov_vector())

    # -- loss plumbing (subclasses implement forward/backward) ----------------

    def _loss(self, params: dict, batch: dict, dropout_mask=None) -> float:
        loss, _, _ = self._forward_backward(params, batch, dropout_mask, need_grads=False)
        return loss

    def _loss_and_grads(self, params: dict, batch: dict, dropout_mask=None):
        loss, grads, _ = self._forward_backward(params, batch, dropout_mask, need_grads=True)
        return loss, grads

    # -- the training loop -----------------------------------------------------

    def _fit_arrays(self, train_batch: dict, valid_batch: dict | None):
        cfg = self._train_config()
        rng = np.random.default_rng(cfg.seed)
        params = self._init_params(rng)
        adam = Adam(cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon)

        n = len(train_batch["y"])
        history: list[dict] = []
        clip_norms: list[float] = []
        best_acc, best_epoch, best_params = -1.0, 0, None
        for epoch in range(1, cfg.epochs + 1):
            order = rng.permutation(n)
            epoch_loss = 0.0
            for start in range(0, n, cfg.batch_size):
                idx = order[start : start + cfg.batch_size]
                batch = _slice_batch(train_batch, idx)
                mask = None
                if cfg.dropout > 0.0:
                    keep = rng.random((len(idx), self._head_dim())) >= cfg.dropout
                    mask = keep.astype(np.float64) / (1.0 - cfg.dropout)
                loss, grads = self._loss_and_grads(params, batch, mask)
                if not np.isfinite(loss):
                    raise TrainingDiverged(
                        f"non-finite loss at epoch {epoch} (lr={cfg.learning_rate})"
                    )
                clip_norms.append(clip_global_norm(grads, cfg.grad_clip_norm))
                adam.step(params, grads)
                epoch_loss += loss * len(idx)
            val_acc = (
                self._accuracy(params, valid_batch)
                if valid_batch is not None
                else self._accuracy(params, train_batch)
            )
            history.append(
                {"epoch": epoch, "train_loss": epoch_loss / n, "val_accuracy": val_acc}
            )
            if val_acc > best_acc:
                best_acc = val_acc
                best_epoch = epoch
                best_params = {k: v.copy() for k, v in params.items()}

        self.params_ = best_params if best_params is not None else params
        self.classes_ = list(self._classes)
        self.history_ = history
        self.best_epoch_ = best_epoch
        self.best_val_accuracy_ = best_acc
        self._last_clip_norms = clip_norms
        return self

    def _accuracy(self, params: dict, batch: dict) -> float:
        logits = self._logits(params, batch)
        return float((logits.argmax(axis=1) == batch["y"]).mean())

    def _labels_to_indices(self, y: Sequence[str]) -> np.ndarray:
        index = {label: i for i, label in enumerate(self._classes)}
        try:
            return np.array([index[label] for label in y], dtype=np.int64)
        except KeyError as exc:
            raise ValueError(
                f"unknown label {exc.args[0]!r}; expected one of {self._classes}"
            ) from exc

    # -- persistence -------------------------------------------------------------

    _HEADER = "MIRTH-NN v1"

    def save(self, path: str | Path) -> None:
        check_is_fitted(self, "params_")
        emb = self._require_embeddings()
        meta = {
            "task": self._task,
            "classes": list(self._classes),
            "params": {
                k: (list(v) if isinstance(v, tuple) else v)
                for k, v in self.get_params().items()
                if k != "embeddings"
            },
            "oov_policy": emb.oov_policy,
            "best_epoch": getattr(self, "best_epoch_", None),
        }
        lines = [self._HEADER, "meta\t" + json.dumps(meta, sort_keys=True)]
        for word, row in sorted(emb.vocab.items(), key=lambda kv: kv[1]):
            lines.append(f"vocab\t{word}\t{row}")
        tensors = dict(self.params_)
        if not self.trainable_embeddings:
            tensors["static_embeddings"] = emb.matrix
        for name in sorted(tensors):
            lines.extend(_tensor_lines(name, tensors[name]))
        lines.append("end")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    # -- shared helpers ------------------------------------------------------------

    def _head_dim(self) -> int:
        dim = self._encoder_config().output_dim
        return 2 * dim if self._task == "pairwise" else dim


def _slice_batch(batch: dict, idx: np.ndarray) -> dict:
    return {k: v[idx] for k, v in batch.items()}


def _tensor_lines(name: str, tensor: np.ndarray) -> list[str]:
    tensor = np.asarray(tensor, dtype=np.float64)
    shape = ",".join(str(d) for d in tensor.shape)
    lines = [f"tensor\t{name}\t{shape}"]
    rows = tensor.reshape(1, -1) if tensor.ndim == 1 else tensor
    for row in rows:
        lines.append(" ".join(repr(float(v)) for v in row))
    return lines


class NeuralTextClassifier(_NeuralBase, ClassifierMixin):
    """Single-text joke/nonjoke classifier with a CNN or LSTM encoder.

    Embeddings stay frozen by default; training hyperparameters default to
    the benchmark recipe (15 epochs, batch 64, dropout 0.1, gradient norm
    clipped at 1.0, adaptive-moment epsilon 1e-8, seed 1).
    """

    _task = "single"
    _classes = _SINGLE_CLASSES

    def __init__(
        self,
        encoder: str = "cnn",
        embeddings: EmbeddingMatrix | None = None,
        hidden_dim: int = 32,
        conv_channels: tuple[int, int] = (64, 64),
        learning_rate: float = 1e-3,
        epochs: int = 15,
        batch_size: int = 64,
        dropout: float = 0.1,
        grad_clip_norm: float = 1.0,
        adam_epsilon: float = 1e-8,
        adam_beta1: float = 0.9,
        adam_beta2: float = 0.999,
        seed: int = 1,
        max_sequence_length: int = 64,
        trainable_embeddings: bool = False,
    ):
        self.encoder = encoder
        self.embeddings = embeddings
        self.hidden_dim = hidden_dim
        self.conv_channels = conv_channels
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.dropout = dropout
        self.grad_clip_norm = grad_clip_norm
        self.adam_epsilon = adam_epsilon
        self.adam_beta1 = adam_beta1
        self.adam_beta2 = adam_beta2
        self.seed = seed
        self.max_sequence_length = max_sequence_length
        self.trainable_embeddings = trainable_embeddings

    def _init_params(self, rng: np.random.Generator) -> dict:
        cfg = self._encoder_config()
        emb = self._require_embeddings()
        params = _init_encoder_params(rng, "", cfg, emb.dim)
        params["Wout"] = _glorot(rng, cfg.output_dim, 2, (cfg.output_dim, 2))
        params["bout"] = np.zeros(2, dtype=np.float64)
        if self.trainable_embeddings:
            params["emb"] = emb.matrix.copy()
        return params

    def _prepare_batch(self, texts: Sequence[str], y: Sequence[str] | None):
        ids, truncated = self._texts_to_ids(check_texts(texts))
        batch = {"ids": ids}
        batch["y"] = (
            self._labels_to_indices(y) if y is not None
            else np.zeros(len(texts), dtype=np.int64)
        )
        return batch, truncated

    def _forward_backward(self, params, batch, dropout_mask, need_grads):
        cfg = self._encoder_config()
        ids = batch["ids"]
        x, mask = self._embed(params, ids)
        enc, enc_cache = _encoder_forward(params, "", cfg, x, mask)
        z = enc if dropout_mask is None else enc * dropout_mask
        logits, head_cache = ops.affine_forward(z, params["Wout"], params["bout"])
        loss, dlogits, probs = ops.softmax_cross_entropy(logits, batch["y"])
        if not need_grads:
            return loss, None, probs
        dz, dWout, dbout = ops.affine_backward(dlogits, head_cache)
        if dropout_mask is not None:
            dz = dz * dropout_mask
        dx, grads = _encoder_backward(dz, enc_cache, "")
        grads["Wout"] = dWout
        grads["bout"] = dbout
        if self.trainable_embeddings:
            grads["emb"] = ops.embed_backward(dx, ids, params["emb"].shape[0])
        return loss, grads, probs

    def _logits(self, params, batch) -> np.ndarray:
        cfg = self._encoder_config()
        x, mask = self._embed(params, batch["ids"])
        enc, _ = _encoder_forward(params, "", cfg, x, mask)
        logits, _ = ops.affine_forward(enc, params["Wout"], params["bout"])
        return logits

    def fit(self, X: Sequence[str], y: Sequence[str], validation_data=None):
        """Train on texts X with labels in {"joke", "nonjoke"}."""
        if len(X) != len(y):
            raise ValueError("X and y must have the same length")
        train_batch, truncated = self._prepare_batch(X, y)
        counts = {"train": truncated}
        valid_batch = None
        if validation_data is not None:
            vx, vy = validation_data
            valid_batch, v_trunc = self._prepare_batch(vx, vy)
            counts["validation"] = v_trunc
        self.truncation_counts_ = counts
        if truncated:
            logger.info("truncated %d/%d training texts to %d tokens",
                        truncated, len(X), self.max_sequence_length)
        return self._fit_arrays(train_batch, valid_batch)

    def predict(self, X: Sequence[str]) -> list[str]:
        check_is_fitted(self, "params_")
        batch, _ = self._prepare_batch(X, None)
        logits = self._logits(self.params_, batch)
        return [self.classes_[i] for i in logits.argmax(axis=1)]

    def predict_proba(self, X: Sequence[str]) -> np.ndarray:
        check_is_fitted(self, "params_")
        batch, _ = self._prepare_batch(X, None)
        logits = self._logits(self.params_, batch)
        shifted = logits - logits.max(axis=1, keepdims=True)
        e = np.exp(shifted)
        return e / e.sum(axis=1, keepdims=True)

    def encode(self, X: Sequence[str]) -> np.ndarray:
        """Fixed-length encoder features for each text (inference mode)."""
        check_is_fitted(self, "params_")
        batch, _ = self._prepare_batch(X, None)
        x, mask = self._embed(self.params_, batch["ids"])
        enc, _ = _encoder_forward(self.params_, "", self._encoder_config(), x, mask)
        return enc

    @classmethod
    def load(cls, path: str | Path) -> "NeuralTextClassifier":
        model = load_model(path)
        if not isinstance(model, cls):
            raise DataError(f"{path}: not a single-task model")
        return model


class PairwiseNeuralClassifier(_NeuralBase, ClassifierMixin):
    """Which-side-is-the-joke classifier over (text_a, text_b) pairs.

    Two encoders with separate parameters share one trainable embedding
    table; their encodings are concatenated before the output layer.
    """

    _task = "pairwise"
    _classes = _PAIR_CLASSES

    def __init__(
        self,
        encoder: str = "lstm",
        embeddings: EmbeddingMatrix | None = None,
        hidden_dim: int = 32,
        conv_channels: tuple[int, int] = (64, 64),
        learning_rate: float = 1e-3,
        epochs: int = 15,
        batch_size: int = 64,
        dropout: float = 0.1,
        grad_clip_norm: float = 1.0,
        adam_epsilon: float = 1e-8,
        adam_beta1: float = 0.9,
        adam_beta2: float = 0.999,
        seed: int = 1,
        max_sequence_length: int = 64,
        trainable_embeddings: bool = True,
    ):
        self.encoder = encoder
        self.embeddings = embeddings
        self.hidden_dim = hidden_dim
        self.conv_channels = conv_channels
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.dropout = dropout
        self.grad_clip_norm = grad_clip_norm
        self.adam_epsilon = adam_epsilon
        self.adam_beta1 = adam_beta1
        self.adam_beta2 = adam_beta2
        self.seed = seed
        self.max_sequence_length = max_sequence_length
        self.trainable_embeddings = trainable_embeddings

    def _init_params(self, rng: np.random.Generator) -> dict:
        cfg = self._encoder_config()
        emb = self._require_embeddings()
        params = _init_encoder_params(rng, "a.", cfg, emb.dim)
        params.update(_init_encoder_params(rng, "b.", cfg, emb.dim))
        params["Wout"] = _glorot(rng, 2 * cfg.output_dim, 2, (2 * cfg.output_dim, 2))
        params["bout"] = np.zeros(2, dtype=np.float64)
        if self.trainable_embeddings:
            params["emb"] = emb.matrix.copy()
        return params

    def _prepare_batch(self, pairs: Sequence[tuple[str, str]], y: Sequence[str] | None):
        texts_a = [p[0] for p in pairs]
        texts_b = [p[1] for p in pairs]
        ids_a, trunc_a = self._texts_to_ids(check_texts(texts_a))
        ids_b, trunc_b = self._texts_to_ids(check_texts(texts_b))
        batch = {"ids_a": ids_a, "ids_b": ids_b}
        batch["y"] = (
            self._labels_to_indices(y) if y is not None
            else np.zeros(len(pairs), dtype=np.int64)
        )
        return batch, trunc_a + trunc_b

    def _forward_backward(self, params, batch, dropout_mask, need_grads):
        cfg = self._encoder_config()
        xa, mask_a = self._embed(params, batch["ids_a"])
        xb, mask_b = self._embed(params, batch["ids_b"])
        enc_a, cache_a = _encoder_forward(params, "a.", cfg, xa, mask_a)
        enc_b, cache_b = _encoder_forward(params, "b.", cfg, xb, mask_b)
        z = np.concatenate([enc_a, enc_b], axis=1)
        if dropout_mask is not None:
            z = z * dropout_mask
        logits, head_cache = ops.affine_forward(z, params["Wout"], params["bout"])
        loss, dlogits, probs = ops.softmax_cross_entropy(logits, batch["y"])
        if not need_grads:
            return loss, None, probs
        dz, dWout, dbout = ops.affine_backward(dlogits, head_cache)
        if dropout_mask is not None:
            dz = dz * dropout_mask
        dim = cfg.output_dim
        dxa, grads_a = _encoder_backward(dz[:, :dim], cache_a, "a.")
        dxb, grads_b = _encoder_backward(dz[:, dim:], cache_b, "b.")
        grads = {**grads_a, **grads_b, "Wout": dWout, "bout": dbout}
        if self.trainable_embeddings:
            rows = params["emb"].shape[0]
            grads["emb"] = ops.embed_backward(dxa, batch["ids_a"], rows)
            grads["emb"] += ops.embed_backward(dxb, batch["ids_b"], rows)
        return loss, grads, probs

    def _logits(self, params, batch) -> np.ndarray:
        cfg = self._encoder_config()
        xa, mask_a = self._embed(params, batch["ids_a"])
        xb, mask_b = self._embed(params, batch["ids_b"])
        enc_a, _ = _encoder_forward(params, "a.", cfg, xa, mask_a)
        enc_b, _ = _encoder_forward(params, "b.", cfg, xb, mask_b)
        z = np.concatenate([enc_a, enc_b], axis=1)
        logits, _ = ops.affine_forward(z, params["Wout"], params["bout"])
        return logits

    def fit(self, X: Sequence[tuple[str, str]], y: Sequence[str], validation_data=None):
        """Train on (text_a, text_b) pairs with targets in {"a", "b"}."""
        if len(X) != len(y):
            raise ValueError("X and y must have the same length")
        train_batch, truncated = self._prepare_batch(X, y)
        counts = {"train": truncated}
        valid_batch = None
        if validation_data is not None:
            vx, vy = validation_data
            valid_batch, v_trunc = self._prepare_batch(vx, vy)
            counts["validation"] = v_trunc
        self.truncation_counts_ = counts
        return self._fit_arrays(train_batch, valid_batch)

    def predict(self, X: Sequence[tuple[str, str]]) -> list[str]:
        check_is_fitted(self, "params_")
        batch, _ = self._prepare_batch(X, None)
        logits = self._logits(self.params_, batch)
        return [self.classes_[i] for i in logits.argmax(axis=1)]

    @classmethod
    def load(cls, path: str | Path) -> "PairwiseNeuralClassifier":
        model = load_model(path)
        if not isinstance(model, cls):
            raise DataError(f"{path}: not a pairwise model")
        return model


# -- checkpoint reading -----------------------------------------------------------

def load_model(path: str | Path):
    """Load a MIRTH-NN v1 checkpoint into the matching classifier class."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read model {path}: {exc}") from exc
    if not lines or lines[0] != _NeuralBase._HEADER:
        raise DataError(f"{path}:1: not a {_NeuralBase._HEADER} file")
    if len(lines) < 2 or not lines[1].startswith("meta\t"):
        raise DataError(f"{path}:2: missing meta record")
    try:
        meta = json.loads(lines[1].split("\t", 1)[1])
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}:2: bad meta JSON: {exc}") from exc

    vocab: dict[str, int] = {}
    tensors: dict[str, np.ndarray] = {}
    i = 2
    terminated = False
    while i < len(lines):
        line = lines[i]
        if line == "end":
            terminated = True
            break
        if line.startswith("vocab\t"):
            fields = line.split("\t")
            if len(fields) != 3:
                raise DataError(f"{path}:{i + 1}: malformed vocab record")
            vocab[fields[1]] = int(fields[2])
            i += 1
            continue
        if line.startswith("tensor\t"):
            fields = line.split("\t")
            if len(fields) != 3:
                raise DataError(f"{path}:{i + 1}: malformed tensor record")
            name = fields[1]
            shape = tuple(int(d) for d in fields[2].split(","))
            n_rows = 1 if len(shape) == 1 else shape[0]
            rows = []
            for j in range(n_rows):
                if i + 1 + j >= len(lines):
                    raise DataError(f"{path}: truncated tensor {name!r}")
                try:
                    rows.append([float(v) for v in lines[i + 1 + j].split(" ")])
                except ValueError as exc:
                    raise DataError(f"{path}:{i + 2 + j}: bad tensor row: {exc}") from exc
            tensors[name] = np.array(rows, dtype=np.float64).reshape(shape)
            i += 1 + n_rows
            continue
        raise DataError(f"{path}:{i + 1}: unexpected record {line.split(chr(9))[0]!r}")
    if not terminated:
        raise DataError(f"{path}: truncated model file (missing end record)")

    task = meta.get("task")
    if task == "single":
        cls = NeuralTextClassifier
    elif task == "pairwise":
        cls = PairwiseNeuralClassifier
    else:
        raise DataError(f"{path}: unknown task {task!r}")

    params_meta = dict(meta.get("params", {}))
    if "conv_channels" in params_meta:
        params_meta["conv_channels"] = tuple(params_meta["conv_channels"])
    trainable = params_meta.get("trainable_embeddings", False)
    if trainable:
        if "emb" not in tensors:
            raise DataError(f"{path}: trainable model is missing its 'emb' tensor")
        emb_matrix = tensors["emb"]
    else:
        if "static_embeddings" not in tensors:
            raise DataError(f"{path}: frozen model is missing 'static_embeddings'")
        emb_matrix = tensors.pop("static_embeddings")
    embeddings = EmbeddingMatrix(
        vocab=vocab, matrix=emb_matrix.copy(), oov_policy=meta.get("oov_policy", "zero")
    )

    model = cls(embeddings=embeddings, **params_meta)
    model.params_ = tensors
    model.classes_ = list(meta.get("classes", model._classes))
    model.best_epoch_ = meta.get("best_epoch")
    return model
