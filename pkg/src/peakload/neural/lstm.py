"""Single-layer LSTM with a linear read-out of the last hidden state."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mlp import sigmoid

GATES = ("f", "i", "g", "o")


@dataclass(frozen=True)
class LstmConfig:
    hidden_size: int = 16
    lookback: int = 7
    epochs: int = 100
    learning_rate: float = 0.01
    batch_size: int = 32
    clip: float = 5.0
    seed: int = 0

    def __post_init__(self):
        if self.hidden_size < 1 or self.lookback < 1:
            raise ValueError("hidden_size and lookback must be positive")
        if not self.clip > 0:
            raise ValueError("gradient clip norm must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


@dataclass(frozen=True)
class CellState:
    c: np.ndarray
    h: np.ndarray

    @classmethod
    def zeros(cls, hidden_size: int) -> "CellState":
        return cls(np.zeros(hidden_size), np.zeros(hidden_size))


def param_names() -> list:
    names = []
    for g in GATES:
        names += [f"W_{g}x", f"W_{g}h", f"b_{g}"]
    return names + ["W_y", "b_y"]


def init_params(n_inputs: int, hidden_size: int, rng: np.random.Generator) -> dict:
    H = hidden_size
    bound = 1.0 / np.sqrt(n_inputs + H)
    params = {}
    for g in GATES:
        params[f"W_{g}x"] = rng.uniform(-bound, bound, size=(H, n_inputs))
        params[f"W_{g}h"] = rng.uniform(-bound, bound, size=(H, H))
        params[f"b_{g}"] = np.zeros(H)
    head = 1.0 / np.sqrt(H)
    params["W_y"] = rng.uniform(-head, head, size=(1, H))
    params["b_y"] = np.zeros(1)
    return params


def zero_params(n_inputs: int, hidden_size: int) -> dict:
    return {k: np.zeros_like(v) for k, v in
            init_params(n_inputs, hidden_size, np.random.default_rng(0)).items()}


def lstm_cell(params: dict, state: CellState, x_t) -> CellState:
    """One LSTM step::

        f = sigmoid(W_fx x + W_fh h + b_f)    i = sigmoid(W_ix x + W_ih h + b_i)
        g = tanh(W_gx x + W_gh h + b_g)       o = sigmoid(W_ox x + W_oh h + b_o)
        c' = f * c + i * g                    h' = o * tanh(c')
    """
    x = np.asarray(x_t, dtype=float)
    h, c = state.h, state.c
    if x.shape != (params["W_fx"].shape[1],) or h.shape != (params["W_fh"].shape[1],):
        raise ValueError("input or state dimension does not match the cell parameters")
    pre = {g: params[f"W_{g}x"] @ x + params[f"W_{g}h"] @ h + params[f"b_{g}"] for g in GATES}
    f = sigmoid(pre["f"])
    i = sigmoid(pre["i"])
    g = np.tanh(pre["g"])
    o = sigmoid(pre["o"])
    c_new = f * c + i * g
    return CellState(c_new, o * np.tanh(c_new))


def _stacked(params: dict):
    Wx = np.vstack([params[f"W_{g}x"] for g in GATES])
    Wh = np.vstack([params[f"W_{g}h"] for g in GATES])
    b = np.concatenate([params[f"b_{g}"] for g in GATES])
    return Wx, Wh, b


def _run(params: dict, X: np.ndarray, keep: bool):
    X = np.asarray(X, dtype=float)
    if X.ndim == 2:
        X = X[None]
    B, L, d = X.shape
    Wx, Wh, b = _stacked(params)
    if d != Wx.shape[1]:
        raise ValueError(f"sequence has {d} features, cell expects {Wx.shape[1]}")
    H = Wh.shape[1]
    h = np.zeros((B, H))
    c = np.zeros((B, H))
    cache = []
    xw = X @ Wx.T + b
    for t in range(L):
        z = xw[:, t, :] + h @ Wh.T
        f = sigmoid(z[:, :H])
        i = sigmoid(z[:, H:2 * H])
        g = np.tanh(z[:, 2 * H:3 * H])
        o = sigmoid(z[:, 3 * H:])
        c_prev, h_prev = c, h
        c = f * c_prev + i * g
        tc = np.tanh(c)
        h = o * tc
        if keep:
            cache.append((h_prev, c_prev, f, i, g, o, tc))
    out = (h @ params["W_y"].T + params["b_y"])[:, 0]
    return out, h, cache, X


def forward(params: dict, X: np.ndarray) -> np.ndarray:
    """Predictions for a batch of sequences with shape (n, L, d)."""
    return _run(params, X, keep=False)[0]


def final_states(params: dict, X: np.ndarray) -> np.ndarray:
    return _run(params, X, keep=False)[1]


def loss_and_grad(params: dict, X: np.ndarray, y: np.ndarray):
    """Mean squared error and full backpropagation-through-time gradients."""
    out, h_last, cache, X = _run(params, X, keep=True)
    B, L, _ = X.shape
    Wx, Wh, _ = _stacked(params)
    H = Wh.shape[1]
    err = out - y
    loss = float(err @ err) / B
    dout = (2.0 / B) * err
    grads = {"W_y": dout[None, :] @ h_last, "b_y": np.array([dout.sum()])}
    dWx = np.zeros_like(Wx)
    dWh = np.zeros_like(Wh)
    db = np.zeros(4 * H)
    dh = dout[:, None] * params["W_y"][0][None, :]
    dc = np.zeros((B, H))
    for t in range(L - 1, -1, -1):
        h_prev, c_prev, f, i, g, o, tc = cache[t]
        do = dh * tc
        dc = dc + dh * o * (1.0 - tc * tc)
        dz = np.concatenate([
            dc * c_prev * f * (1.0 - f),
            dc * g * i * (1.0 - i),
            dc * i * (1.0 - g * g),
            do * o * (1.0 - o),
        ], axis=1)
        dWx += dz.T @ X[:, t, :]
        dWh += dz.T @ h_prev
        db += dz.sum(axis=0)
        dh = dz @ Wh
        dc = dc * f
    for k, gname in enumerate(GATES):
        rows = slice(k * H, (k + 1) * H)
        grads[f"W_{gname}x"] = dWx[rows]
        grads[f"W_{gname}h"] = dWh[rows]
        grads[f"b_{gname}"] = db[rows]
    return loss, grads
