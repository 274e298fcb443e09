"""Multilayer perceptron: sigmoid hidden layers, identity output."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MlpConfig:
    lag_order: int = 7
    hidden_sizes: tuple = (16,)
    epochs: int = 200
    learning_rate: float = 0.01
    batch_size: int = 32
    seed: int = 0
    clip: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "hidden_sizes", tuple(int(h) for h in self.hidden_sizes))
        if not self.hidden_sizes or min(self.hidden_sizes) < 1:
            raise ValueError("MLP needs at least one hidden layer of positive width")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.lag_order < 1:
            raise ValueError("lag_order must be positive")


def sigmoid(x):
    # Split by sign so large |x| never overflows exp.
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def layer_names(n_hidden: int) -> list:
    return [(f"W{i}", f"b{i}") for i in range(1, n_hidden + 2)]


def init_params(n_inputs: int, hidden_sizes, rng: np.random.Generator) -> dict:
    sizes = [n_inputs, *hidden_sizes, 1]
    params = {}
    for (wn, bn), fan_in, fan_out in zip(layer_names(len(hidden_sizes)), sizes[:-1], sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        params[wn] = rng.uniform(-bound, bound, size=(fan_out, fan_in))
        params[bn] = np.zeros(fan_out)
    return params


def _layers(params: dict):
    n = len(params) // 2
    return [(params[f"W{i}"], params[f"b{i}"]) for i in range(1, n + 1)]


def forward(params: dict, X: np.ndarray) -> np.ndarray:
    """Batch forward pass; ``X`` has shape (n, inputs)."""
    a = np.atleast_2d(np.asarray(X, dtype=float))
    layers = _layers(params)
    expected = layers[0][0].shape[1]
    if a.shape[1] != expected:
        raise ValueError(f"input has {a.shape[1]} features, network expects {expected}")
    for W, b in layers[:-1]:
        a = sigmoid(a @ W.T + b)
    W, b = layers[-1]
    return (a @ W.T + b)[:, 0]


def mlp_forward(params: dict, x) -> float:
    """Scalar output for a single input vector."""
    return float(forward(params, np.asarray(x, dtype=float)[None, :])[0])


def loss_and_grad(params: dict, X: np.ndarray, y: np.ndarray):
    """Mean squared error and its gradient with respect to every array in ``params``."""
    layers = _layers(params)
    acts = [np.atleast_2d(X)]
    for W, b in layers[:-1]:
        acts.append(sigmoid(acts[-1] @ W.T + b))
    W_out, b_out = layers[-1]
    out = (acts[-1] @ W_out.T + b_out)[:, 0]
    err = out - y
    n = y.size
    loss = float(err @ err) / n
    delta = (2.0 / n) * err[:, None]
    grads = {}
    for i in range(len(layers), 0, -1):
        W, _ = layers[i - 1]
        a_prev = acts[i - 1]
        grads[f"W{i}"] = delta.T @ a_prev
        grads[f"b{i}"] = delta.sum(axis=0)
        if i > 1:
            delta = (delta @ W) * a_prev * (1.0 - a_prev)
    return loss, grads
