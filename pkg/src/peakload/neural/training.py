"""Mini-batch Adam training and finite-difference gradient checks."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import lstm, mlp
from .lstm import LstmConfig
from .mlp import MlpConfig
from .windows import SupervisedWindow, stack_windows

logger = logging.getLogger(__name__)

KINDS = ("mlp", "lstm")


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class NetParams:
    kind: str
    arrays: dict
    loss_history: tuple = field(default=(), compare=False)

    def to_dict(self) -> dict:
        return {"kind": self.kind,
                "arrays": {k: {"shape": list(v.shape), "data": v.ravel().tolist()}
                           for k, v in self.arrays.items()}}

    @classmethod
    def from_dict(cls, d) -> "NetParams":
        arrays = {k: np.asarray(v["data"], dtype=float).reshape(v["shape"])
                  for k, v in d["arrays"].items()}
        return cls(d["kind"], arrays)


def _module(kind: str):
    if kind == "mlp":
        return mlp
    if kind == "lstm":
        return lstm
    raise ValueError(f"unknown network kind {kind!r}; expected one of {KINDS}")


def net_forward(kind: str, arrays: dict, X: np.ndarray) -> np.ndarray:
    return _module(kind).forward(arrays, X)


def init_net(kind: str, config, n_features: int, rng: np.random.Generator) -> dict:
    if kind == "mlp":
        return mlp.init_params(n_features, config.hidden_sizes, rng)
    return lstm.init_params(n_features, config.hidden_size, rng)


def _clip(grads: dict, max_norm: float | None) -> dict:
    if max_norm is None:
        return grads
    norm = np.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if norm > max_norm:
        scale = max_norm / norm
        return {k: g * scale for k, g in grads.items()}
    return grads


def train_arrays(kind: str, config: MlpConfig | LstmConfig, X: np.ndarray, y: np.ndarray,
                 init: dict | None = None) -> NetParams:
    """Minimise mean squared error with Adam over shuffled mini-batches.

    ``X`` is (n, features) for an MLP and (n, lookback, features) for an LSTM.
    """
    mod = _module(kind)
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if y.size == 0:
        raise ValueError("no training examples")
    rng = np.random.default_rng(config.seed)
    params = init if init is not None else init_net(kind, config, X.shape[-1], rng)
    params = {k: np.array(v, dtype=float) for k, v in params.items()}
    m = {k: np.zeros_like(v) for k, v in params.items()}
    v = {k: np.zeros_like(v) for k, v in params.items()}
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    lr = config.learning_rate
    step = 0
    history = []
    n = y.size
    bs = max(1, min(config.batch_size, n))
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        total = 0.0
        for b, start in enumerate(range(0, n, bs)):
            idx = order[start:start + bs]
            loss, grads = mod.loss_and_grad(params, X[idx], y[idx])
            if not np.isfinite(loss):
                raise TrainingError(f"{kind}: non-finite loss at epoch {epoch}, batch {b}")
            grads = _clip(grads, config.clip)
            step += 1
            c1 = 1.0 - beta1 ** step
            c2 = 1.0 - beta2 ** step
            for k in params:
                g = grads[k]
                m[k] = beta1 * m[k] + (1.0 - beta1) * g
                v[k] = beta2 * v[k] + (1.0 - beta2) * g * g
                params[k] -= lr * (m[k] / c1) / (np.sqrt(v[k] / c2) + eps)
            total += loss * idx.size
        history.append(total / n)
    for k, a in params.items():
        if not np.all(np.isfinite(a)):
            raise TrainingError(f"{kind}: parameter {k} became non-finite")
    return NetParams(kind, params, tuple(history))


def train(kind: str, config: MlpConfig | LstmConfig, windows: list) -> NetParams:
    """Train an MLP or LSTM on supervised windows (already scaled)."""
    X, y = stack_windows(windows, kind)
    return train_arrays(kind, config, X, y)


def window_loss_and_grad(kind: str, arrays: dict, window: SupervisedWindow):
    x = window.sequence[None] if kind == "lstm" else window.inputs[None]
    return _module(kind).loss_and_grad(arrays, x, np.array([window.target]))


def gradient_check(kind: str, arrays: dict, window: SupervisedWindow, step: float = 1e-5) -> float:
    """Largest disagreement between analytic and central-difference gradients.

    Per entry the error is ``|g_a - g_n| / max(1, |g_a| + |g_n|)``.
    """
    _, analytic = window_loss_and_grad(kind, arrays, window)
    work = {k: np.array(v, dtype=float) for k, v in arrays.items()}
    worst = 0.0
    for name, arr in work.items():
        flat = arr.reshape(-1)
        g_a = analytic[name].reshape(-1)
        for j in range(flat.size):
            orig = flat[j]
            flat[j] = orig + step
            up, _ = window_loss_and_grad(kind, work, window)
            flat[j] = orig - step
            down, _ = window_loss_and_grad(kind, work, window)
            flat[j] = orig
            g_n = (up - down) / (2 * step)
            err = abs(g_a[j] - g_n) / max(1.0, abs(g_a[j]) + abs(g_n))
            worst = max(worst, err)
    return worst
