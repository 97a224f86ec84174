"""Finite-difference oracle for the hand-written backpropagation.

Central differences on a random sample of parameter coordinates against
the analytic gradient.  The relative error uses the symmetric form
|g_a - g_n| / max(1e-12, |g_a| + |g_n|), and the returned value is the
maximum over all sampled coordinates.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

__all__ = ["gradient_check"]


def gradient_check(
    classifier,
    X: Sequence,
    y: Sequence[str],
    *,
    epsilon: float = 1e-5,
    n_samples: int = 200,
    seed: int = 0,
    with_dropout: bool = False,
) -> float:
    """Max relative error between analytic and numeric gradients.

    Works on a fitted classifier or a fresh one (parameters are then
    initialized from ``seed``).  When ``with_dropout`` is set, a single
    fixed dropout mask is threaded through both paths so the dropped
    coordinates are identical.
    """
    rng = np.random.default_rng(seed)
    params = (
        {k: v.copy() for k, v in classifier.params_.items()}
        if hasattr(classifier, "params_")
        else classifier._init_params(rng)
    )
    batch, _ = classifier._prepare_batch(X, y)
    dropout_mask = None
    if with_dropout and classifier.dropout > 0.0:
        keep = rng.random((len(batch["y"]), classifier._head_dim())) >= classifier.dropout
        dropout_mask = keep.astype(np.float64) / (1.0 - classifier.dropout)

    _, grads = classifier._loss_and_grads(params, batch, dropout_mask)

    names = sorted(grads)
    sizes = np.array([grads[n].size for n in names])
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total = int(offsets[-1])
    k = min(n_samples, total)
    coords = rng.choice(total, size=k, replace=False)

    max_err = 0.0
    for coord in coords:
        which = int(np.searchsorted(offsets, coord, side="right") - 1)
        name = names[which]
        flat_idx = int(coord - offsets[which])
        tensor = params[name]
        original = tensor.flat[flat_idx]
        tensor.flat[flat_idx] = original + epsilon
        loss_plus = classifier._loss(params, batch, dropout_mask)
        tensor.flat[flat_idx] = original - epsilon
        loss_minus = classifier._loss(params, batch, dropout_mask)
        tensor.flat[flat_idx] = original
        numeric = (loss_plus - loss_minus) / (2.0 * epsilon)
        analytic = grads[name].flat[flat_idx]
        err = abs(analytic - numeric) / max(1e-12, abs(analytic) + abs(numeric))
        max_err = max(max_err, err)
    return max_err
