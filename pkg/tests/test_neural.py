import math

import numpy as np
import pytest

from oracles import sigmoid as sig
from peakload.features import FeatureFrame
from peakload.neural import (CellState, LstmConfig, MlpConfig, TrainingError, gradient_check,
                             lstm_cell, mlp_forward, train, train_arrays, window_dataset)
from peakload.neural import lstm, mlp
from peakload.neural.training import NetParams, net_forward
from peakload.series import SeriesError, TimeSeries


def _random_window(rng, L=5, k=2):
    s = TimeSeries.from_values(rng.normal(size=L + 1))
    frame = FeatureFrame(s.dates, {f"x{j}": rng.normal(size=L + 1) for j in range(k)})
    return window_dataset(s, frame, L)[0]


# windows ------------------------------------------------------------------

def test_window_counts_and_pairs():
    s = TimeSeries.from_values(np.arange(10.0))
    assert len(window_dataset(s, None, 7)) == 3
    w = window_dataset(TimeSeries.from_values([1.0, 2.0, 3.0]), None, 1)
    assert [(x.lags.tolist(), x.target) for x in w] == [([1.0], 2.0), ([2.0], 3.0)]
    with pytest.raises(SeriesError, match="too short"):
        window_dataset(TimeSeries.from_values([1.0, 2.0]), None, 2)


def test_window_exog_alignment():
    s = TimeSeries.from_values(np.arange(6.0) * 10)
    frame = FeatureFrame(s.dates, {"x": np.arange(6.0)})
    w = window_dataset(s, frame, 3)[0]
    assert w.date == s.dates[3] and w.target == 30.0
    assert w.lags.tolist() == [20.0, 10.0, 0.0]
    assert w.exog_seq[:, 0].tolist() == [1.0, 2.0, 3.0]
    # Flat input carries the target day's exogenous row exactly once.
    assert w.inputs.tolist() == [20.0, 10.0, 0.0, 3.0]
    assert w.sequence.tolist() == [[0.0, 1.0], [10.0, 2.0], [20.0, 3.0]]


# MLP forward ----------------------------------------------------------------

def test_mlp_zero_network():
    params = {k: np.zeros_like(v) for k, v in
              mlp.init_params(3, (5,), np.random.default_rng(0)).items()}
    assert mlp_forward(params, [1.0, -2.0, 3.0]) == 0.0


def test_mlp_single_neuron():
    params = {"W1": np.array([[1.0]]), "b1": np.zeros(1), "W2": np.array([[2.0]]),
              "b2": np.zeros(1)}
    assert mlp_forward(params, [0.0]) == 1.0


def test_mlp_forward_matches_loop_oracle():
    rng = np.random.default_rng(12)
    params = mlp.init_params(4, (6, 3), rng)
    for _ in range(10):
        x = rng.normal(size=4)
        a = list(x)
        for i in (1, 2):
            W, b = params[f"W{i}"], params[f"b{i}"]
            a = [sig(sum(W[r, c] * a[c] for c in range(len(a))) + b[r]) for r in range(len(b))]
        out = sum(params["W3"][0, c] * a[c] for c in range(len(a))) + params["b3"][0]
        assert mlp_forward(params, x) == pytest.approx(out, abs=1e-12)


def test_mlp_shape_mismatch():
    params = mlp.init_params(3, (2,), np.random.default_rng(0))
    with pytest.raises(ValueError, match="features"):
        mlp.forward(params, np.zeros((1, 4)))


# LSTM cell ------------------------------------------------------------------

def test_lstm_cell_zero_state():
    params = lstm.zero_params(3, 4)
    out = lstm_cell(params, CellState.zeros(4), np.ones(3))
    assert out.c.tolist() == [0.0] * 4 and out.h.tolist() == [0.0] * 4


def test_lstm_cell_hand_case():
    params = lstm.zero_params(2, 3)
    out = lstm_cell(params, CellState(np.full(3, 2.0), np.zeros(3)), np.array([0.7, -1.1]))
    np.testing.assert_allclose(out.c, 1.0, rtol=0, atol=1e-12)
    np.testing.assert_allclose(out.h, 0.5 * math.tanh(1.0), rtol=0, atol=1e-12)
    assert out.h[0] == pytest.approx(0.380797, abs=1e-6)


def test_lstm_cell_remember_gate():
    rng = np.random.default_rng(3)
    params = lstm.init_params(2, 3, rng)
    params["b_f"] = np.full(3, 50.0)
    state = CellState(rng.normal(size=3), rng.normal(size=3))
    x = rng.normal(size=2)
    out = lstm_cell(params, state, x)
    pre_i = params["W_ix"] @ x + params["W_ih"] @ state.h + params["b_i"]
    pre_g = params["W_gx"] @ x + params["W_gh"] @ state.h + params["b_g"]
    i = np.array([sig(v) for v in pre_i])
    np.testing.assert_allclose(out.c, state.c + i * np.tanh(pre_g), atol=1e-12)


def test_lstm_cell_pure_and_bounded():
    rng = np.random.default_rng(4)
    params = lstm.init_params(3, 5, rng)
    params = {k: v * 20 for k, v in params.items()}
    state = CellState.zeros(5)
    for _ in range(30):
        x = rng.normal(scale=5, size=3)
        a = lstm_cell(params, state, x)
        b = lstm_cell(params, state, x)
        assert np.array_equal(a.h, b.h) and np.array_equal(a.c, b.c)
        assert np.max(np.abs(a.h)) <= 1.0
        state = a


def test_lstm_batch_forward_matches_cell_loop():
    rng = np.random.default_rng(5)
    params = lstm.init_params(3, 4, rng)
    X = rng.normal(size=(6, 7, 3))
    batch = lstm.forward(params, X)
    for n in range(6):
        state = CellState.zeros(4)
        for t in range(7):
            state = lstm_cell(params, state, X[n, t])
        ref = float(params["W_y"][0] @ state.h + params["b_y"][0])
        assert batch[n] == pytest.approx(ref, abs=1e-12)


def test_lstm_cell_shape_mismatch():
    with pytest.raises(ValueError):
        lstm_cell(lstm.zero_params(2, 3), CellState.zeros(3), np.zeros(4))


# gradients ------------------------------------------------------------------

@pytest.mark.parametrize("kind", ["mlp", "lstm"])
def test_gradient_check_random_points(kind):
    rng = np.random.default_rng(17)
    for _ in range(3):
        window = _random_window(rng)
        if kind == "mlp":
            arrays = mlp.init_params(window.inputs.size, (4, 3), rng)
        else:
            arrays = lstm.init_params(window.sequence.shape[1], 3, rng)
        arrays = {k: v + rng.normal(scale=0.3, size=v.shape) for k, v in arrays.items()}
        assert gradient_check(kind, arrays, window) < 1e-4


@pytest.mark.parametrize("kind", ["mlp", "lstm"])
def test_gradient_check_at_zero(kind):
    window = _random_window(np.random.default_rng(0))
    if kind == "mlp":
        arrays = {k: np.zeros_like(v) for k, v in
                  mlp.init_params(window.inputs.size, (4,), np.random.default_rng(0)).items()}
    else:
        arrays = lstm.zero_params(window.sequence.shape[1], 3)
    err = gradient_check(kind, arrays, window)
    assert np.isfinite(err) and err < 1e-4


# training -------------------------------------------------------------------

def test_mlp_learns_linear_map():
    rng = np.random.default_rng(0)
    x = rng.uniform(-1, 1, size=(400, 1))
    y = 0.5 * x[:, 0]
    net = train_arrays("mlp", MlpConfig(hidden_sizes=(4,), epochs=500, seed=1), x[:300], y[:300])
    pred = net_forward("mlp", net.arrays, x[300:])
    assert np.mean((pred - y[300:]) ** 2) < 1e-3
    assert net.loss_history[-1] <= net.loss_history[0]


def test_mlp_constant_target():
    # A constant series: lags and target are all the same value.
    windows = window_dataset(TimeSeries.from_values(np.full(107, 0.7)), None, 7)
    net = train("mlp", MlpConfig(hidden_sizes=(4,), epochs=300), windows)
    x = np.stack([w.inputs for w in windows])
    assert np.mean((net_forward("mlp", net.arrays, x) - 0.7) ** 2) < 1e-6


def test_lstm_learns_sine_one_step():
    t = np.arange(400)
    y = np.sin(2 * np.pi * t / 20)
    s = TimeSeries.from_values(y)
    windows = window_dataset(s, None, 7)
    net = train("lstm", LstmConfig(hidden_size=8, lookback=7, epochs=60, seed=0), windows[:300])
    X = np.stack([w.sequence for w in windows[300:]])
    target = np.array([w.target for w in windows[300:]])
    assert np.mean((net_forward("lstm", net.arrays, X) - target) ** 2) < 0.01


def test_training_is_bit_reproducible():
    rng = np.random.default_rng(2)
    X, y = rng.normal(size=(50, 3, 2)), rng.normal(size=50)
    a = train_arrays("lstm", LstmConfig(hidden_size=3, epochs=5), X, y)
    b = train_arrays("lstm", LstmConfig(hidden_size=3, epochs=5), X, y)
    for k in a.arrays:
        assert np.array_equal(a.arrays[k], b.arrays[k])
    c = train_arrays("lstm", LstmConfig(hidden_size=3, epochs=5, seed=1), X, y)
    assert not np.array_equal(a.arrays["W_y"], c.arrays["W_y"])


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_training_non_finite_loss_reports_epoch_and_batch():
    X = np.array([[1e200], [1.0]])
    with pytest.raises(TrainingError, match="epoch 0, batch 0"):
        train_arrays("mlp", MlpConfig(hidden_sizes=(2,), epochs=2),
                     X, np.array([1e200, 1.0]))


def test_net_params_round_trip():
    arrays = mlp.init_params(3, (2,), np.random.default_rng(0))
    back = NetParams.from_dict(NetParams("mlp", arrays).to_dict())
    for k in arrays:
        assert np.array_equal(back.arrays[k], arrays[k])


def test_config_validation():
    with pytest.raises(ValueError):
        MlpConfig(hidden_sizes=())
    with pytest.raises(ValueError):
        LstmConfig(clip=0.0)
    with pytest.raises(ValueError):
        LstmConfig(hidden_size=0)
