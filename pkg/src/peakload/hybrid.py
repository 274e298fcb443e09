"""Additive hybrids: a SARIMAX linear part plus a learned model of its residuals.

The linear fit gives L_t and residuals r_t = y_t - L_t. A window forecaster
(MLP, SVR or LSTM) is trained on r_t with the exogenous rows, and forecasts
are the elementwise sum of both components' dynamic forecasts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from . import sarimax
from .features import FeatureFrame
from .models import KINDS, WindowForecaster, make_forecaster
from .series import SeriesError, TimeSeries


class ZeroResidual:
    """Residual predictor that always predicts zero."""

    kind = "zero"
    lookback = 0

    def __init__(self):
        self.last_day: int | None = None

    def fit(self, series: TimeSeries, frame: FeatureFrame | None = None) -> "ZeroResidual":
        self.last_day = series.end
        return self

    def predict_in_sample(self, series: TimeSeries, frame=None) -> TimeSeries:
        return series.with_values(np.zeros(len(series)))

    def forecast(self, horizon: int, future: FeatureFrame | None = None) -> TimeSeries:
        dates = np.arange(self.last_day + 1, self.last_day + 1 + horizon, dtype=np.int64)
        return TimeSeries(dates, np.zeros(horizon))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "last_day": self.last_day}

    @classmethod
    def from_dict(cls, d: Mapping) -> "ZeroResidual":
        obj = cls()
        obj.last_day = int(d["last_day"])
        return obj


@dataclass(frozen=True)
class HybridForecast:
    """Hybrid forecast together with the two components it is the sum of."""

    total: TimeSeries
    linear: TimeSeries
    residual: TimeSeries


@dataclass
class HybridModel:
    linear: sarimax.SarimaxFit
    residual_kind: str
    residual: object

    @property
    def last_day(self) -> int:
        return self.linear.series.end

    def to_dict(self) -> dict:
        from .io import envelope
        return {
            "linear": envelope("sarimax", sarimax.to_envelope_dict(self.linear)),
            "residual_kind": self.residual_kind,
            "residual": envelope(self.residual_kind, self.residual.to_dict()),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "HybridModel":
        from .io import open_envelope
        _, lin = open_envelope(d["linear"])
        kind, res = open_envelope(d["residual"])
        residual = ZeroResidual.from_dict(res) if kind == "zero" else WindowForecaster.from_dict(res)
        return cls(sarimax.from_envelope_dict(lin), d["residual_kind"], residual)


def _linear_fit(series, frame, linear, opt, criterion, workers) -> sarimax.SarimaxFit:
    if isinstance(linear, sarimax.SarimaxFit):
        if not np.array_equal(linear.series.dates, series.dates):
            raise SeriesError("supplied SARIMAX fit was estimated on a different date range")
        return linear
    if isinstance(linear, str):
        linear = sarimax.SarimaxOrder.parse(linear)
    if isinstance(linear, sarimax.SarimaxOrder):
        return sarimax.fit(series, frame, linear, opt)
    return sarimax.select_order(series, frame, linear, criterion, opt, workers)


# Residuals carry far less signal than the load itself; a full-size LSTM
# overfits them. Explicit params override these.
RESIDUAL_DEFAULTS = {"lstm": {"hidden_size": 8, "epochs": 30}}


def make_residual(residual, params: Mapping | None = None):
    if isinstance(residual, str):
        if residual == "zero":
            return ZeroResidual()
        if residual not in KINDS:
            raise ValueError(f"unknown residual model {residual!r}; expected zero or {KINDS}")
        return make_forecaster(residual, {**RESIDUAL_DEFAULTS.get(residual, {}),
                                          **dict(params or {})})
    return residual


def fit_hybrid(series: TimeSeries, frame: FeatureFrame | None,
               linear: sarimax.SarimaxFit | sarimax.SarimaxOrder | str | Iterable | Mapping,
               residual="mlp", residual_params: Mapping | None = None, *,
               opt: sarimax.OptConfig = sarimax.OptConfig(), criterion: str = "aic",
               workers: int = 1) -> HybridModel:
    """Fit the linear part, then train ``residual`` on its in-sample residuals.

    ``linear`` is a fixed order, an order grid searched by ``criterion``, or
    an already fitted SARIMAX model for ``series``. ``residual`` is a model
    kind (``mlp``, ``svr``, ``lstm``, ``zero``) or an unfitted predictor
    object with ``fit``/``forecast``/``predict_in_sample``/``to_dict``.
    """
    if frame is not None:
        frame.require_aligned(series)
    lin = _linear_fit(series, frame, linear, opt, criterion, workers)
    r = sarimax.residuals(lin)
    r_frame = frame.slice_dates(r.start, r.end) if frame is not None else None
    model = make_residual(residual, residual_params)
    model.fit(r, r_frame)
    kind = residual if isinstance(residual, str) else getattr(model, "kind", "custom")
    return HybridModel(lin, kind, model)


def forecast_components(model: HybridModel, horizon: int,
                        future: FeatureFrame | None = None) -> HybridForecast:
    lin = sarimax.forecast_dynamic(model.linear, horizon, future)
    res = model.residual.forecast(horizon, future)
    if not np.array_equal(lin.dates, res.dates):
        raise SeriesError("linear and residual forecasts cover different dates")
    return HybridForecast(lin.with_values(lin.values + res.values), lin, res)


def forecast_hybrid(model: HybridModel, horizon: int,
                    future: FeatureFrame | None = None) -> TimeSeries:
    """Dynamic hybrid forecast: linear forecast plus residual forecast, day by day."""
    return forecast_components(model, horizon, future).total


def fitted_hybrid(model: HybridModel) -> TimeSeries:
    """In-sample hybrid values L_t + N_t on the days the residual model predicts."""
    r = sarimax.residuals(model.linear)
    frame = model.linear.frame
    r_frame = frame.slice_dates(r.start, r.end) if frame is not None else None
    n_hat = model.residual.predict_in_sample(r, r_frame)
    lin = model.linear.fitted.slice_dates(n_hat.start, n_hat.end)
    return n_hat.with_values(lin.values + n_hat.values)
