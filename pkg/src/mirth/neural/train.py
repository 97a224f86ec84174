"""Optimizer pieces shared by the neural classifiers: the adaptive-moment
update and global gradient-norm clipping."""

from __future__ import annotations

import math

import numpy as np

__all__ = ["Adam", "clip_global_norm", "global_norm"]


def global_norm(grads: dict[str, np.ndarray]) -> float:
    total = 0.0
    for g in grads.values():
        total += float(np.sum(g * g))
    return math.sqrt(total)


def clip_global_norm(grads: dict[str, np.ndarray], max_norm: float) -> float:
    """Scale gradients in place so the global norm is at most max_norm.

    Returns the post-clip norm.
    """
    norm = global_norm(grads)
    if norm > max_norm > 0:
        scale = max_norm / norm
        for g in grads.values():
            g *= scale
        return max_norm
    return norm


class Adam:
    """Adaptive-moment estimation with bias correction."""

    def __init__(self, learning_rate: float, beta1: float = 0.9,
                 beta2: float = 0.999, epsilon: float = 1e-8):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.t = 0
        self._m: dict[str, np.ndarray] = {}
        self._v: dict[str, np.ndarray] = {}

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        bias1 = 1.0 - b1**self.t
        bias2 = 1.0 - b2**self.t
        for name, grad in grads.items():
            if name not in self._m:
                self._m[name] = np.zeros_like(grad)
                self._v[name] = np.zeros_like(grad)
            m = self._m[name]
            v = self._v[name]
            m *= b1
            m += (1.0 - b1) * grad
            v *= b2
            v += (1.0 - b2) * grad * grad
            params[name] -= self.learning_rate * (m / bias1) / (
                np.sqrt(v / bias2) + self.epsilon
            )
