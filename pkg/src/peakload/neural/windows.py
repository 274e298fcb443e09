"""Supervised windows for NARX-style models."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..features import FeatureFrame
from ..series import SeriesError, TimeSeries


@dataclass(frozen=True)
class SupervisedWindow:
    """One predictable day.

    ``lags`` holds y_{t-1}, ..., y_{t-L} (most recent first); ``exog_seq``
    holds the exogenous rows for days t-L+1 .. t, so its last row belongs to
    the target day.
    """

    date: int
    lags: np.ndarray
    exog_seq: np.ndarray
    target: float

    @property
    def inputs(self) -> np.ndarray:
        """Flat MLP input: lagged targets followed by the target day's exogenous row."""
        return np.concatenate([self.lags, self.exog_seq[-1]])

    @property
    def sequence(self) -> np.ndarray:
        """LSTM input, shape (L, 1 + k): step j pairs y_{t-L+j} with the exog row of day t-L+j+1."""
        return np.column_stack([self.lags[::-1], self.exog_seq])


def window_arrays(values: np.ndarray, exog: np.ndarray, lookback: int):
    """Vectorised windows: ``(lags (n, L), exog_seq (n, L, k), targets (n,))``."""
    values = np.asarray(values, dtype=float)
    exog = np.asarray(exog, dtype=float).reshape(values.size, -1)
    if lookback < 1:
        raise ValueError("lookback must be at least 1")
    n = values.size - lookback
    if n < 1:
        raise SeriesError(f"series of length {values.size} is too short for lookback {lookback}")
    idx = np.arange(lookback, values.size)
    lag_idx = idx[:, None] - np.arange(1, lookback + 1)[None, :]
    exog_idx = idx[:, None] - np.arange(lookback - 1, -1, -1)[None, :]
    return values[lag_idx], exog[exog_idx], values[idx]


def window_dataset(series: TimeSeries, frame: FeatureFrame | None, lookback: int) -> list:
    """One window per day after the first ``lookback`` days."""
    if frame is not None:
        frame.require_aligned(series)
        exog = frame.matrix()
    else:
        exog = np.zeros((len(series), 0))
    lags, seq, targets = window_arrays(series.values, exog, lookback)
    dates = series.dates[lookback:]
    return [SupervisedWindow(int(d), lags[i], seq[i], float(targets[i]))
            for i, d in enumerate(dates)]


def stack_windows(windows, kind: str):
    """Turn windows into training arrays for ``kind`` ('mlp' or 'lstm')."""
    if not windows:
        raise ValueError("no windows")
    y = np.array([w.target for w in windows])
    if kind == "lstm":
        return np.stack([w.sequence for w in windows]), y
    return np.stack([w.inputs for w in windows]), y


def mlp_inputs(lags: np.ndarray, exog_seq: np.ndarray) -> np.ndarray:
    return np.concatenate([lags, exog_seq[:, -1, :]], axis=1)


def lstm_inputs(lags: np.ndarray, exog_seq: np.ndarray) -> np.ndarray:
    return np.concatenate([lags[:, ::-1, None], exog_seq], axis=2)
