"""Window-based forecasters (NARX MLP, LSTM, SVR) sharing one scaling and roll-out path.

Every forecaster is trained on lagged targets plus exogenous rows in
standardised units, and forecasts continue from the last training day by
feeding predictions back into the lag slots.
"""

from __future__ import annotations

import dataclasses
from typing import Mapping

import numpy as np

from .features import FLAG_COLUMNS, FeatureFrame
from .neural.lstm import LstmConfig
from .neural.mlp import MlpConfig
from .neural.training import NetParams, net_forward, train_arrays
from .neural.windows import lstm_inputs, mlp_inputs, window_arrays
from .series import ColumnScaler, SeriesError, TimeSeries
from .svr import Kernel, SvrConfig, SvrModel, fit_svr

KINDS = ("mlp", "svr", "lstm")
TARGET = "y"


class WindowForecaster:
    kind = ""

    def __init__(self, config, lookback: int):
        self.config = config
        self.lookback = int(lookback)
        self.scaler: ColumnScaler | None = None
        self.columns: tuple = ()
        self.model = None
        self.last_day: int | None = None
        self._tail_values: np.ndarray | None = None
        self._tail_exog: np.ndarray | None = None

    # subclass hooks -------------------------------------------------------
    def _fit_arrays(self, lags, exog_seq, y):
        raise NotImplementedError

    def _predict_arrays(self, lags, exog_seq) -> np.ndarray:
        raise NotImplementedError

    def _roll(self, lags, exog_before, exog_future, horizon) -> np.ndarray:
        L = self.lookback
        exog = np.vstack([exog_before, exog_future])
        off = exog_before.shape[0]
        buf = list(lags[::-1])
        out = np.empty(horizon)
        for s in range(horizon):
            lag_vec = np.array(buf[-L:][::-1])[None, :]
            seq = exog[off + s - (L - 1): off + s + 1][None]
            out[s] = self._predict_arrays(lag_vec, seq)[0]
            buf.append(out[s])
        return out

    # scaling --------------------------------------------------------------
    def _scaled(self, series: TimeSeries, frame: FeatureFrame | None):
        y = self.scaler.apply(TARGET, series.values)
        if not self.columns:
            return y, np.zeros((len(series), 0))
        cols = []
        for name in self.columns:
            col = frame.columns[name]
            cols.append(col if name in FLAG_COLUMNS else self.scaler.apply(name, col))
        return y, np.column_stack(cols)

    def _scaled_frame(self, frame: FeatureFrame | None, n: int) -> np.ndarray:
        if not self.columns:
            return np.zeros((n, 0))
        return np.column_stack([frame.columns[c] if c in FLAG_COLUMNS
                                else self.scaler.apply(c, frame.columns[c])
                                for c in self.columns])

    def fit(self, series: TimeSeries, frame: FeatureFrame | None = None,
            rows: np.ndarray | None = None) -> "WindowForecaster":
        """Train on the windows of ``series``; ``rows`` restricts training to a subset
        of window indices (used by cross validation)."""
        if frame is not None:
            frame.require_aligned(series)
        n_win = len(series) - self.lookback
        if n_win < 2:
            raise SeriesError(
                f"series of length {len(series)} too short for lookback {self.lookback}")
        rows = np.arange(n_win) if rows is None else np.sort(np.asarray(rows, dtype=int))
        target_idx = rows + self.lookback
        fit_cols = {TARGET: series.values[target_idx]}
        used = []
        if frame is not None:
            for name in frame.names:
                col = frame.columns[name][target_idx]
                if np.std(col) == 0.0:
                    continue
                used.append(name)
                if name not in FLAG_COLUMNS:
                    fit_cols[name] = col
        if np.std(fit_cols[TARGET]) == 0.0:
            # Constant target: unit scale keeps the model well defined.
            mean = float(fit_cols.pop(TARGET)[0])
            base = ColumnScaler.fit(fit_cols) if fit_cols else ColumnScaler((), np.zeros(0),
                                                                            np.zeros(0))
            self.scaler = ColumnScaler((TARGET,) + base.names,
                                       np.concatenate([[mean], base.mean]),
                                       np.concatenate([[1.0], base.std]))
        else:
            self.scaler = ColumnScaler.fit(fit_cols)
        self.columns = tuple(used)
        y, exog = self._scaled(series, frame)
        lags, seq, targets = window_arrays(y, exog, self.lookback)
        self.model = self._fit_arrays(lags[rows], seq[rows], targets[rows])
        self.last_day = series.end
        self._tail_values = y[-self.lookback:].copy()
        self._tail_exog = exog[-(self.lookback - 1):].copy() if self.lookback > 1 \
            else np.zeros((0, exog.shape[1]))
        return self

    def predict_windows(self, series: TimeSeries, frame: FeatureFrame | None,
                        rows: np.ndarray | None = None) -> np.ndarray:
        """One-step predictions (original units) for the windows of ``series``."""
        y, exog = self._scaled(series, frame)
        lags, seq, _ = window_arrays(y, exog, self.lookback)
        if rows is not None:
            lags, seq = lags[rows], seq[rows]
        return self.scaler.invert(TARGET, self._predict_arrays(lags, seq))

    def predict_in_sample(self, series: TimeSeries, frame: FeatureFrame | None) -> TimeSeries:
        return TimeSeries(series.dates[self.lookback:], self.predict_windows(series, frame))

    def forecast(self, horizon: int, future: FeatureFrame | None = None) -> TimeSeries:
        """Dynamic forecast for the ``horizon`` days after the training period."""
        if self.model is None:
            raise RuntimeError("forecaster is not fitted")
        if self.columns:
            if future is None:
                raise SeriesError("a future frame is required")
            future.require_follows(self.last_day, horizon)
        exog_future = self._scaled_frame(future, horizon)
        pred = self._roll(self._tail_values[::-1], self._tail_exog, exog_future, horizon)
        dates = np.arange(self.last_day + 1, self.last_day + 1 + horizon, dtype=np.int64)
        return TimeSeries(dates, self.scaler.invert(TARGET, pred))

    # serialisation ---------------------------------------------------------
    def _model_dict(self) -> dict:
        raise NotImplementedError

    def _load_model(self, d) -> None:
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "lookback": self.lookback,
            "config": config_to_dict(self.config),
            "columns": list(self.columns),
            "scaler": self.scaler.to_dict(),
            "last_day": self.last_day,
            "tail_values": self._tail_values.tolist(),
            "tail_exog": self._tail_exog.tolist(),
            "model": self._model_dict(),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "WindowForecaster":
        obj = make_forecaster(d["kind"], d["config"])
        obj.lookback = d["lookback"]
        obj.columns = tuple(d["columns"])
        obj.scaler = ColumnScaler.from_dict(d["scaler"])
        obj.last_day = int(d["last_day"])
        obj._tail_values = np.asarray(d["tail_values"], dtype=float)
        obj._tail_exog = np.asarray(d["tail_exog"], dtype=float).reshape(-1, len(obj.columns))
        obj._load_model(d["model"])
        return obj


class MlpForecaster(WindowForecaster):
    """NARX network: lagged targets and the day's exogenous row feed a sigmoid MLP."""

    kind = "mlp"

    def __init__(self, config: MlpConfig = MlpConfig()):
        super().__init__(config, config.lag_order)

    def _fit_arrays(self, lags, exog_seq, y):
        return train_arrays("mlp", self.config, mlp_inputs(lags, exog_seq), y)

    def _predict_arrays(self, lags, exog_seq):
        return net_forward("mlp", self.model.arrays, mlp_inputs(lags, exog_seq))

    def _model_dict(self):
        return self.model.to_dict()

    def _load_model(self, d):
        self.model = NetParams.from_dict(d)


class LstmForecaster(WindowForecaster):
    kind = "lstm"

    def __init__(self, config: LstmConfig = LstmConfig()):
        super().__init__(config, config.lookback)

    def _fit_arrays(self, lags, exog_seq, y):
        return train_arrays("lstm", self.config, lstm_inputs(lags, exog_seq), y)

    def _predict_arrays(self, lags, exog_seq):
        return net_forward("lstm", self.model.arrays, lstm_inputs(lags, exog_seq))

    def _model_dict(self):
        return self.model.to_dict()

    def _load_model(self, d):
        self.model = NetParams.from_dict(d)


class SvrForecaster(WindowForecaster):
    kind = "svr"

    def __init__(self, config: SvrConfig = SvrConfig(), lookback: int = 7):
        super().__init__(config, lookback)

    def _fit_arrays(self, lags, exog_seq, y):
        return fit_svr(self.config, mlp_inputs(lags, exog_seq), y)

    def _predict_arrays(self, lags, exog_seq):
        return self.model.decision(mlp_inputs(lags, exog_seq))

    def _model_dict(self):
        return self.model.to_dict()

    def _load_model(self, d):
        self.model = SvrModel.from_dict(d)


def predict_dynamic(model: WindowForecaster, horizon: int,
                    future: FeatureFrame | None = None) -> TimeSeries:
    """Roll a trained network forward ``horizon`` days, returning original units."""
    return model.forecast(horizon, future)


def config_to_dict(config) -> dict:
    d = dataclasses.asdict(config)
    if isinstance(config, SvrConfig):
        d["kernel"] = str(config.kernel)
    if "hidden_sizes" in d:
        d["hidden_sizes"] = list(d["hidden_sizes"])
    return d


def make_config(kind: str, params: Mapping | None = None):
    """Build a typed config for ``kind`` from a plain mapping (unknown keys rejected)."""
    params = dict(params or {})
    cls = {"mlp": MlpConfig, "lstm": LstmConfig, "svr": SvrConfig}.get(kind)
    if cls is None:
        raise ValueError(f"unknown model kind {kind!r}; expected one of {KINDS}")
    lookback = params.pop("lookback", None) if kind == "svr" else None
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(params) - known
    if unknown:
        raise ValueError(f"unknown {kind} hyperparameter(s): {', '.join(sorted(unknown))}")
    if kind == "svr" and isinstance(params.get("kernel"), str):
        params["kernel"] = Kernel.parse(params["kernel"])
    if "hidden_sizes" in params and isinstance(params["hidden_sizes"], (int, str)):
        params["hidden_sizes"] = tuple(int(h) for h in str(params["hidden_sizes"]).split("-"))
    config = cls(**params)
    return (config, lookback) if kind == "svr" else config


def make_forecaster(kind: str, params: Mapping | None = None) -> WindowForecaster:
    if kind == "svr":
        config, lookback = make_config("svr", params)
        return SvrForecaster(config, 7 if lookback is None else int(lookback))
    config = make_config(kind, params)
    return MlpForecaster(config) if kind == "mlp" else LstmForecaster(config)
