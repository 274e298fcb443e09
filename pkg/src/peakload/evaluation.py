"""Forecast accuracy metrics, stratified k-fold cross validation, grid search and
the multi-model benchmark report."""

from __future__ import annotations

import itertools
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import hybrid, sarimax
from .features import FeatureFrame
from .models import KINDS, config_to_dict, make_forecaster
from .series import SeriesError, TimeSeries, iso

logger = logging.getLogger(__name__)

CRITERIA = ("rmse", "mse", "mae", "mape")
METRIC_COLUMNS = ("mse", "mae", "rmse", "mape", "predictive_r2", "predicted_max")
REPORT_COLUMNS = ("model",) + METRIC_COLUMNS + ("wall_seconds",)

# Row names and the residual/single model kind behind each one.
MODEL_NAMES = ("SARIMAX", "ANN", "SVR", "LSTM", "SARIMAX-ANN", "SARIMAX-SVR", "SARIMAX-LSTM")
_KIND_OF = {"ANN": "mlp", "SVR": "svr", "LSTM": "lstm"}

# Published reference numbers for context (MSE as printed, MAPE in percent).
REFERENCE_ROWS = {
    "SARIMAX": {"mse": 18478.3927, "mae": 3614.0325, "rmse": 4298.6501, "mape": 5.4246,
                "predictive_r2": 0.796, "predicted_max": 83356.0},
    "ANN": {"mse": 16889.1212, "mae": 3562.2479, "rmse": 4109.6376, "mape": 4.9787,
            "predictive_r2": 0.818, "predicted_max": 82262.0},
    "SVR": {"mse": 13073.4383, "mae": 3004.1915, "rmse": 3615.7210, "mape": 4.1648,
            "predictive_r2": 0.822, "predicted_max": 83116.0},
    "LSTM": {"mse": 9651.2456, "mae": 2027.5753, "rmse": 3106.6454, "mape": 2.9889,
             "predictive_r2": 0.861, "predicted_max": 89800.0},
    "SARIMAX-ANN": {"mse": 13036.3277, "mae": 2943.8969, "rmse": 3610.5855, "mape": 4.3262,
                    "predictive_r2": 0.854, "predicted_max": 85212.0},
    "SARIMAX-SVR": {"mse": 11552.9814, "mae": 2788.5578, "rmse": 3398.9677, "mape": 4.1585,
                    "predictive_r2": 0.898, "predicted_max": 83889.0},
    "SARIMAX-LSTM": {"mse": 9568.9936, "mae": 2326.8125, "rmse": 3093.3790, "mape": 3.4737,
                     "predictive_r2": 0.918, "predicted_max": 84811.0},
    "KSLF": {"mse": 12468.3275, "mae": 3088.5000, "rmse": 3531.0519, "mape": 4.3673,
             "predictive_r2": None, "predicted_max": 83440.0},
}
REFERENCE_ACTUAL_MAX_MW = 91300.0


class MetricError(ValueError):
    pass


# -- metrics -----------------------------------------------------------------

@dataclass(frozen=True)
class MetricReport:
    """Accuracy of one forecast. ``mse`` in MW^2, ``mape`` in percent."""

    mse: float
    rmse: float
    mae: float
    mape: float
    predictive_r2: float
    predicted_max: float

    def get(self, name: str) -> float:
        return getattr(self, name)

    def to_dict(self) -> dict:
        return {c: _finite_or_none(getattr(self, c)) for c in METRIC_COLUMNS}


def _finite_or_none(x):
    return float(x) if x is not None and math.isfinite(x) else None


def _values(x, what: str) -> np.ndarray:
    return np.asarray(x.values if isinstance(x, TimeSeries) else x, dtype=float).ravel()


def metrics(actual, predicted) -> MetricReport:
    """RMSE, MSE, MAE, MAPE, out-of-sample R^2 and the largest prediction.

    ``actual`` and ``predicted`` are equal-length arrays or date-aligned series.
    R^2 is ``1 - SSE/SST`` with SST taken about the mean of ``actual``; it is
    NaN when ``actual`` is constant.
    """
    if isinstance(actual, TimeSeries) and isinstance(predicted, TimeSeries):
        if not np.array_equal(actual.dates, predicted.dates):
            raise MetricError("actual and predicted series cover different dates")
    y = _values(actual, "actual")
    yhat = _values(predicted, "predicted")
    if y.size != yhat.size:
        raise MetricError(f"length mismatch: {y.size} actual vs {yhat.size} predicted")
    if y.size == 0:
        raise MetricError("no observations")
    zero = np.flatnonzero(y == 0.0)
    if zero.size:
        where = zero[0]
        label = iso(actual.dates[where]) if isinstance(actual, TimeSeries) else f"index {where}"
        raise MetricError(f"MAPE undefined: actual value is zero at {label}")
    err = yhat - y
    n = y.size
    mse = float(err @ err) / n
    mae = float(np.sum(np.abs(err))) / n
    mape = 100.0 * float(np.sum(np.abs(err / y))) / n
    dev = y - np.mean(y)
    sst = float(dev @ dev)
    r2 = 1.0 - float(err @ err) / sst if sst > 0 else math.nan
    return MetricReport(mse=mse, rmse=math.sqrt(mse), mae=mae, mape=mape, predictive_r2=r2,
                        predicted_max=float(np.max(yhat)))


def score(actual, predicted, criterion: str = "rmse") -> float:
    if criterion not in CRITERIA:
        raise ValueError(f"criterion must be one of {CRITERIA}, got {criterion!r}")
    return metrics(actual, predicted).get(criterion)


# -- stratified k-fold ----------------------------------------------------------

@dataclass(frozen=True)
class FoldAssignment:
    folds: np.ndarray
    k: int
    strata: np.ndarray

    def valid_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.folds == fold)

    def train_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.folds != fold)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.folds, minlength=self.k)


def quantile_strata(targets, bins: int = 10) -> np.ndarray:
    """Stratum index per row from the empirical quantiles of ``targets``.

    Tied values always share a stratum, so a constant target is one stratum.
    """
    t = np.asarray(targets, dtype=float).ravel()
    edges = np.quantile(t, np.linspace(0.0, 1.0, bins + 1)[1:-1])
    raw = np.searchsorted(edges, t, side="right")
    _, strata = np.unique(raw, return_inverse=True)
    return strata.astype(int)


def stratified_kfold(targets, k: int = 5, seed: int = 0, bins: int = 10) -> FoldAssignment:
    """Assign rows to ``k`` folds, balancing target quantile strata.

    Rows of each stratum are shuffled and the strata are then dealt one after
    another round-robin across a shuffled fold order, so fold sizes differ by
    at most one and each stratum is split as evenly as possible.
    """
    t = np.asarray(targets, dtype=float).ravel()
    n = t.size
    if k < 2:
        raise ValueError("k must be at least 2")
    if n < k:
        raise ValueError(f"cannot split {n} rows into {k} folds")
    if bins < 1:
        raise ValueError("bins must be positive")
    rng = np.random.default_rng(seed)
    strata = quantile_strata(t, bins)
    order = np.concatenate([rng.permutation(np.flatnonzero(strata == s))
                            for s in range(strata.max() + 1)])
    labels = rng.permutation(k)
    folds = np.empty(n, dtype=int)
    folds[order] = labels[np.arange(n) % k]
    return FoldAssignment(folds, k, strata)


# -- grid search ------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Named hyperparameter axes; combinations enumerate in lexicographic order
    (axes sorted by name, values sorted within each axis)."""

    axes: Mapping[str, tuple]
    cap: int = 1000

    def __post_init__(self):
        axes = {}
        for name in sorted(self.axes):
            values = list(self.axes[name])
            if not values:
                raise ValueError(f"grid axis {name!r} is empty")
            try:
                values = sorted(values)
            except TypeError:
                pass
            axes[name] = tuple(values)
        object.__setattr__(self, "axes", axes)
        if self.size() > self.cap:
            raise ValueError(f"grid has {self.size()} combinations, cap is {self.cap}")

    def size(self) -> int:
        return math.prod(len(v) for v in self.axes.values())

    def combinations(self) -> list:
        names = list(self.axes)
        return [dict(zip(names, combo)) for combo in itertools.product(*self.axes.values())]


@dataclass(frozen=True)
class GridResult:
    best: dict
    best_score: float
    table: tuple
    criterion: str


def cross_validate(kind: str, params: Mapping, series: TimeSeries, frame: FeatureFrame | None,
                   folds: FoldAssignment, criterion: str = "rmse") -> list:
    """Held-out one-step score per fold; rows index the model's training windows.

    Each model is retrained on the remaining folds (the sorted union of their
    windows) and scored on the windows of the held-out fold.
    """
    model = make_forecaster(kind, params)
    lookback = model.lookback
    targets = series.values[lookback:]
    if targets.size != folds.folds.size:
        raise ValueError(f"fold assignment has {folds.folds.size} rows, "
                         f"series has {targets.size} windows")
    scores = []
    for f in range(folds.k):
        model = make_forecaster(kind, params)
        model.fit(series, frame, rows=folds.train_rows(f))
        valid = folds.valid_rows(f)
        scores.append(score(targets[valid], model.predict_windows(series, frame, valid),
                            criterion))
    return scores


def grid_search(kind: str, grid: GridSpec, series: TimeSeries, frame: FeatureFrame | None,
                k: int = 5, seed: int = 0, criterion: str = "rmse", base: Mapping | None = None,
                workers: int = 1) -> GridResult:
    """Exhaustive search minimising the mean cross-validated ``criterion``.

    ``base`` holds fixed hyperparameters shared by every cell. Folds are
    stratified on the window targets. Ties go to the earliest combination.
    """
    if kind not in KINDS:
        raise ValueError(f"grid search supports {KINDS}, got {kind!r}")
    base = dict(base or {})
    combos = grid.combinations()
    # Folds are drawn per lookback so cells with the same window set share them.
    fold_sets = {}

    def folds_for(L):
        if L not in fold_sets:
            fold_sets[L] = stratified_kfold(series.values[L:], k, seed)
        return fold_sets[L]

    def cell(combo):
        params = {**base, **combo}
        try:
            folds = folds_for(make_forecaster(kind, params).lookback)
            fold_scores = cross_validate(kind, params, series, frame, folds, criterion)
            return {"params": combo, "score": float(np.mean(fold_scores)),
                    "fold_scores": fold_scores, "error": None}
        except (ValueError, ArithmeticError, RuntimeError) as exc:
            logger.warning("grid cell %s failed: %s", combo, exc)
            return {"params": combo, "score": None, "fold_scores": None, "error": str(exc)}

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            table = list(pool.map(cell, combos))
    else:
        table = [cell(c) for c in combos]
    ok = [row for row in table if row["score"] is not None and math.isfinite(row["score"])]
    if not ok:
        raise RuntimeError(f"all {len(table)} grid combinations failed")
    best = min(ok, key=lambda row: row["score"])
    return GridResult(dict(best["params"]), best["score"], tuple(table), criterion)


# -- benchmark --------------------------------------------------------------

DEFAULT_SARIMAX_GRID = {"p": (1, 2), "d": (0,), "q": (0, 1), "P": (0, 1), "D": (0,),
                        "Q": (0,), "S": (7,)}


@dataclass(frozen=True)
class BenchmarkSettings:
    """What to fit for each roster entry.

    ``linear`` is a SARIMAX order (text or ``SarimaxOrder``) or an order grid
    searched by ``criterion``. ``params`` gives fixed hyperparameters per
    model kind; ``grids`` optionally names a grid searched by cross
    validation before the final fit. The master ``seed`` seeds every model.
    """

    linear: object = field(default_factory=lambda: dict(DEFAULT_SARIMAX_GRID))
    criterion: str = "aic"
    params: Mapping = field(default_factory=dict)
    grids: Mapping = field(default_factory=dict)
    folds: int = 5
    cv_criterion: str = "rmse"
    seed: int = 0
    workers: int = 1
    timing: bool = False
    opt: sarimax.OptConfig = sarimax.OptConfig()


@dataclass(frozen=True)
class BenchmarkRow:
    model: str
    metrics: MetricReport | None
    forecast: TimeSeries | None = None
    error: str | None = None
    wall_seconds: float | None = None
    detail: Mapping = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.metrics is not None

    def to_dict(self) -> dict:
        d = {"model": self.model}
        d.update(self.metrics.to_dict() if self.metrics else {c: None for c in METRIC_COLUMNS})
        d["wall_seconds"] = self.wall_seconds
        for key in ("order", "config", "cv_score"):
            if key in self.detail:
                d[key] = self.detail[key]
        if self.error is not None:
            d["error"] = self.error
        return d


def _fmt(v) -> str:
    if isinstance(v, (list, tuple)):
        return "-".join(str(x) for x in v)
    return f"{v:g}" if isinstance(v, float) else str(v)


def _rank_key(row: BenchmarkRow):
    return (0, row.metrics.rmse, row.model) if row.ok else (1, 0.0, row.model)


@dataclass(frozen=True)
class BenchmarkReport:
    rows: tuple
    test_start: int
    test_end: int
    actual: TimeSeries
    components: Mapping = field(default_factory=dict)
    linear_residuals: TimeSeries | None = None

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    def row(self, name: str) -> BenchmarkRow:
        for r in self.rows:
            if r.model == name:
                return r
        raise KeyError(name)

    def ranked(self) -> list:
        return sorted(self.rows, key=_rank_key)

    def to_dict(self) -> dict:
        return {
            "test_start": iso(self.test_start),
            "test_end": iso(self.test_end),
            "actual_max": float(np.max(self.actual.values)),
            "rows": [r.to_dict() for r in self.ranked()],
            "reference": {"rows": {k: dict(v) for k, v in REFERENCE_ROWS.items()},
                          "actual_max": REFERENCE_ACTUAL_MAX_MW,
                          "note": "published values on the Korean 2019 test set; "
                                  "their MSE column is scaled by 1/1000 (MW^2/1000)"},
        }

    def table_rows(self) -> list:
        return [[r.to_dict().get(c) for c in REPORT_COLUMNS] for r in self.ranked()]

    def to_text(self) -> str:
        head = f"{'model':<14}{'MSE (MW^2)':>18}{'MAE':>12}{'RMSE':>12}{'MAPE %':>9}" \
               f"{'R2':>8}{'max':>11}"
        lines = [f"test period {iso(self.test_start)}..{iso(self.test_end)}, "
                 f"actual max {np.max(self.actual.values):.0f} MW", head, "-" * len(head)]
        for r in self.ranked():
            if not r.ok:
                lines.append(f"{r.model:<14}  FAILED: {r.error}")
                continue
            m = r.metrics
            r2 = f"{m.predictive_r2:8.3f}" if math.isfinite(m.predictive_r2) else f"{'n/a':>8}"
            lines.append(f"{r.model:<14}{m.mse:18.1f}{m.mae:12.1f}{m.rmse:12.1f}{m.mape:9.3f}"
                         f"{r2}{m.predicted_max:11.0f}")
        settings = [r for r in self.ranked() if r.detail]
        if settings:
            lines += ["", "fitted settings"]
        for r in settings:
            parts = [f"order {r.detail['order']}"] if "order" in r.detail else []
            parts += [f"{k}={_fmt(v)}" for k, v in r.detail.get("config", {}).items()]
            if "cv_score" in r.detail:
                parts.append(f"cv_score={r.detail['cv_score']:.1f}")
            lines.append(f"{r.model:<14}{' '.join(parts)}")
        lines += ["", "reference (published; MSE in MW^2/1000, actual max "
                      f"{REFERENCE_ACTUAL_MAX_MW:.0f} MW)"]
        for name, ref in sorted(REFERENCE_ROWS.items(), key=lambda kv: kv[1]["rmse"]):
            r2 = f"{ref['predictive_r2']:8.3f}" if ref["predictive_r2"] is not None \
                else f"{'n/a':>8}"
            lines.append(f"{name:<14}{ref['mse']:18.4f}{ref['mae']:12.4f}{ref['rmse']:12.4f}"
                         f"{ref['mape']:9.4f}{r2}{ref['predicted_max']:11.0f}")
        return "\n".join(lines) + "\n"


def _resolved(model) -> dict:
    """Every hyperparameter a fitted window model used, defaults included."""
    return {**config_to_dict(model.config), "lookback": model.lookback}


def _model_params(settings: BenchmarkSettings, kind: str, offset: int) -> dict:
    params = dict(settings.params.get(kind, {}))
    if kind != "svr":  # the SVR solver is deterministic and takes no seed
        params.setdefault("seed", settings.seed + offset)
    return params


def _tuned_params(settings, kind, offset, series, frame) -> tuple:
    params = _model_params(settings, kind, offset)
    grid = settings.grids.get(kind)
    if grid is None:
        return params, None
    result = grid_search(kind, grid, series, frame, settings.folds, settings.seed,
                         settings.cv_criterion, base=params)
    return {**params, **result.best}, result


def benchmark(train: tuple, test: tuple, roster: Sequence[str] = MODEL_NAMES,
              settings: BenchmarkSettings = BenchmarkSettings()) -> BenchmarkReport:
    """Fit every roster model on ``train`` and score dynamic forecasts over ``test``.

    One SARIMAX fit is shared by the SARIMAX row and all hybrids. A model that
    raises is recorded as a failed row and the run continues.
    """
    roster = list(dict.fromkeys(roster))
    if not roster:
        raise ValueError("roster is empty")
    unknown = [m for m in roster if m not in MODEL_NAMES]
    if unknown:
        raise ValueError(f"unknown model(s) {unknown}; expected names from {MODEL_NAMES}")
    train_s, train_f = train
    test_s, test_f = test
    if test_s.start != train_s.end + 1:
        raise SeriesError("test period must start the day after training ends")
    horizon = len(test_s)

    linear = None
    linear_error = None
    linear_seconds = None
    if any(m.startswith("SARIMAX") for m in roster):
        t0 = time.perf_counter()
        try:
            linear = hybrid._linear_fit(train_s, train_f, settings.linear, settings.opt,
                                        settings.criterion, settings.workers)
        except (SeriesError, sarimax.SarimaxError, ValueError, np.linalg.LinAlgError) as exc:
            linear_error = f"SARIMAX: {exc}"
        linear_seconds = time.perf_counter() - t0

    components = {}

    def run(index_name):
        index, name = index_name
        t0 = time.perf_counter()
        detail = {}
        try:
            if name == "SARIMAX":
                if linear is None:
                    raise RuntimeError(linear_error)
                pred = sarimax.forecast_dynamic(linear, horizon, test_f)
                detail["order"] = str(linear.order)
            elif name in _KIND_OF:
                kind = _KIND_OF[name]
                params, grid = _tuned_params(settings, kind, index, train_s, train_f)
                model = make_forecaster(kind, params).fit(train_s, train_f)
                pred = model.forecast(horizon, test_f)
                detail["config"] = _resolved(model)
                if grid is not None:
                    detail["cv_score"] = grid.best_score
            else:
                if linear is None:
                    raise RuntimeError(linear_error)
                kind = _KIND_OF[name.split("-", 1)[1]]
                r = sarimax.residuals(linear)
                r_frame = train_f.slice_dates(r.start, r.end) if train_f is not None else None
                params, grid = _tuned_params(settings, kind, index, r, r_frame)
                model = hybrid.fit_hybrid(train_s, train_f, linear, kind, params)
                parts = hybrid.forecast_components(model, horizon, test_f)
                components[name] = parts
                pred = parts.total
                detail["order"] = str(linear.order)
                detail["config"] = _resolved(model.residual)
            m = metrics(test_s, pred)
            err = None
        except Exception as exc:  # noqa: BLE001 - a failed row must not stop the run
            logger.warning("%s failed: %s", name, exc)
            pred, m, err = None, None, f"{type(exc).__name__}: {exc}"
        seconds = time.perf_counter() - t0
        if name == "SARIMAX" and linear_seconds is not None:
            seconds += linear_seconds
        return BenchmarkRow(name, m, pred, err, seconds if settings.timing else None, detail)

    jobs = list(enumerate(roster))
    if settings.workers > 1:
        with ThreadPoolExecutor(settings.workers) as pool:
            rows = list(pool.map(run, jobs))
    else:
        rows = [run(j) for j in jobs]
    return BenchmarkReport(tuple(rows), test_s.start, test_s.end, test_s,
                           {k: components[k] for k in roster if k in components},
                           sarimax.residuals(linear) if linear is not None else None)
