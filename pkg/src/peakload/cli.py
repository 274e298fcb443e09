"""Command line interface: ``peakload {synth,fit,forecast,benchmark,gridsearch,evaluate}``.

Every command prints a JSON summary on success. On failure it prints a JSON
error object to stderr and exits with status 1 (2 for usage errors).
Artifacts go to ``--out``, else ``$PEAKLOAD_OUT``, else ``./peakload-out``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import evaluation, hybrid, io, sarimax, synth
from .config import ConfigError, RunConfig, model_keys, read_config
from .evaluation import MODEL_NAMES, GridSpec
from .features import build_frame
from .models import WindowForecaster, make_forecaster
from .series import SeriesError, TimeSeries, iso, to_day

logger = logging.getLogger("peakload")

# CLI model names -> (linear part?, window kind or None)
MODEL_ALIASES = {
    "sarimax": (True, None),
    "mlp": (False, "mlp"), "ann": (False, "mlp"),
    "svr": (False, "svr"),
    "lstm": (False, "lstm"),
    "sarimax-mlp": (True, "mlp"), "sarimax-ann": (True, "mlp"),
    "sarimax-svr": (True, "svr"),
    "sarimax-lstm": (True, "lstm"),
}
_ROW_NAME = {(True, None): "SARIMAX", (False, "mlp"): "ANN", (False, "svr"): "SVR",
             (False, "lstm"): "LSTM", (True, "mlp"): "SARIMAX-ANN",
             (True, "svr"): "SARIMAX-SVR", (True, "lstm"): "SARIMAX-LSTM"}


class CliError(RuntimeError):
    pass


# -- data -------------------------------------------------------------------

def load_data(cfg: RunConfig) -> tuple:
    """Full (series, frame) for the configured source."""
    if cfg.synth:
        series, weather, cal = synth.generate(synth.reference_config(cfg.synth_seed))
        return series, build_frame(weather, cal)
    return io.load_csv(cfg.load, cfg.weather, cfg.holidays or None)


def cutoff_day(cfg: RunConfig, series: TimeSeries) -> int:
    """Last training day: the configured cutoff, else five sixths of the data."""
    if cfg.cutoff:
        return to_day(cfg.cutoff)
    n_train = len(series) * synth.REFERENCE_TRAIN_DAYS // synth.REFERENCE_DAYS
    return int(series.dates[max(n_train, 1) - 1])


def train_test(cfg: RunConfig) -> tuple:
    series, frame = load_data(cfg)
    from .series import SplitSpec, split
    return split(series, frame, SplitSpec(cutoff_day(cfg, series)))


def _data_args(cfg: RunConfig) -> dict:
    return {"load": cfg.load, "weather": cfg.weather, "holidays": cfg.holidays,
            "synth": cfg.synth, "synth_seed": cfg.synth_seed, "cutoff": cfg.cutoff}


# -- argument handling --------------------------------------------------------

def _add_data_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("data")
    g.add_argument("--config", help="run configuration file (sectioned key = value)")
    g.add_argument("--load", help="load CSV with header date,peak_mw")
    g.add_argument("--weather", help="weather CSV with header date,tmean_c,humidity_pct")
    g.add_argument("--holidays", help="holiday list, one ISO date per line "
                                      "(default: bundled Korean holidays 2014-2019)")
    g.add_argument("--synth", choices=["reference"],
                   help="use the built-in synthetic dataset instead of CSV files")
    g.add_argument("--synth-seed", type=int, help="seed of the synthetic dataset (default 42)")
    g.add_argument("--cutoff", help="last training day, ISO date (default: 5/6 of the data)")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output directory (default $PEAKLOAD_OUT or ./peakload-out)")
    p.add_argument("--seed", type=int, help="master seed; overrides the config file")
    p.add_argument("--workers", type=int, help="worker threads for independent fits")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")


def _set_param(spec: str, cfg: RunConfig, grid: bool) -> None:
    kind_key, _, value = spec.partition("=")
    kind, _, key = kind_key.partition(".")
    if not value or not key:
        raise ConfigError(f"expected KIND.KEY=VALUE, got {spec!r}")
    kind = MODEL_ALIASES.get(kind.lower(), (None, kind))[1] or kind
    keys = model_keys(kind) if kind in ("mlp", "svr", "lstm") else None
    if keys is None:
        raise ConfigError(f"unknown model kind in {spec!r}")
    if key not in keys:
        raise ConfigError(f"unknown {kind} hyperparameter {key!r}; expected one of "
                          f"{', '.join(keys)}")
    if grid:
        cfg.grids.setdefault(kind, {})[key] = tuple(keys[key](v.strip())
                                                    for v in value.split(",") if v.strip())
    else:
        cfg.params.setdefault(kind, {})[key] = keys[key](value)


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = read_config(args.config) if getattr(args, "config", None) else RunConfig()
    if getattr(args, "load", None) or getattr(args, "weather", None):
        cfg.synth = ""
    for name in ("load", "weather", "holidays", "synth", "synth_seed", "cutoff", "seed",
                 "workers", "criterion", "order"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    if getattr(args, "out", None):
        cfg.output = args.out
    if getattr(args, "models", None):
        cfg.models = tuple(m.strip() for m in args.models.split(",") if m.strip())
    if getattr(args, "timing", False):
        cfg.timing = True
    for spec in getattr(args, "param", None) or ():
        _set_param(spec, cfg, grid=False)
    for spec in getattr(args, "grid", None) or ():
        _set_param(spec, cfg, grid=True)
    return cfg.validate()


def _model_name(text: str) -> tuple:
    key = text.strip().lower()
    if key not in MODEL_ALIASES:
        raise ConfigError(f"unknown model {text!r}; expected one of {', '.join(MODEL_ALIASES)}")
    return MODEL_ALIASES[key]


def _ensure_out(cfg: RunConfig) -> Path:
    out = cfg.output_dir()
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- commands -----------------------------------------------------------------

def cmd_synth(args) -> dict:
    """Write the synthetic dataset as load.csv, weather.csv and holidays.txt."""
    cfg = RunConfig(output=args.out or "")
    out = _ensure_out(cfg)
    overrides = {}
    if args.days is not None:
        overrides["n_days"] = args.days
    if args.nonlin_amp is not None:
        overrides["nonlin_amp_mw"] = args.nonlin_amp
    seed = args.seed if args.seed is not None else synth.REFERENCE_SEED
    series, weather, cal = synth.generate(synth.reference_config(seed, **overrides))
    io.write_load_csv(out / "load.csv", series)
    io.write_weather_csv(out / "weather.csv", weather)
    io.write_holidays(out / "holidays.txt", cal)
    return {"command": "synth", "days": len(series),
            "artifacts": [str(out / n) for n in ("load.csv", "weather.csv", "holidays.txt")]}


def _fit_model(cfg: RunConfig, name: tuple, train: tuple):
    linear, kind = name
    series, frame = train
    params = dict(cfg.params.get(kind, {})) if kind else {}
    if kind and kind != "svr":
        params.setdefault("seed", cfg.seed)
    if kind and cfg.grids.get(kind):
        target = series
        tframe = frame
        if linear:
            lin = sarimax.fit(series, frame, sarimax.SarimaxOrder.parse(cfg.order)) if cfg.order \
                else sarimax.select_order(series, frame, cfg.sarimax_grid, cfg.criterion)
            target = sarimax.residuals(lin)
            tframe = frame.slice_dates(target.start, target.end)
        result = evaluation.grid_search(kind, GridSpec(cfg.grids[kind]), target, tframe,
                                        cfg.folds, cfg.seed, cfg.cv_criterion, base=params)
        params.update(result.best)
    if linear and kind:
        return hybrid.fit_hybrid(series, frame, cfg.linear_spec(), kind, params,
                                 criterion=cfg.criterion, workers=cfg.workers)
    if linear:
        spec = cfg.linear_spec()
        if isinstance(spec, sarimax.SarimaxOrder):
            return sarimax.fit(series, frame, spec)
        return sarimax.select_order(series, frame, spec, cfg.criterion, workers=cfg.workers)
    return make_forecaster(kind, params).fit(series, frame)


def _fitted_and_residuals(model, series, frame) -> tuple:
    """In-sample fitted values and (for models with a linear part) its residuals."""
    if isinstance(model, sarimax.SarimaxFit):
        return model.fitted, model.residuals
    if isinstance(model, hybrid.HybridModel):
        return hybrid.fitted_hybrid(model), model.linear.residuals
    return model.predict_in_sample(series, frame), None


def cmd_fit(args) -> dict:
    """Fit one model on the training period and save it."""
    cfg = build_config(args)
    name = _model_name(args.model)
    train, _ = train_test(cfg)
    model = _fit_model(cfg, name, train)
    out = _ensure_out(cfg)
    io.save_model(out / "model.json", model)
    series, frame = train
    fitted, resid = _fitted_and_residuals(model, series, frame)
    rows = [(d, "actual", v) for d, v in zip(series.dates, series.values)]
    rows += [(d, "fitted", v) for d, v in zip(fitted.dates, fitted.values)]
    artifacts = [out / "model.json", out / "fit_plot.csv", out / "fit.json"]
    if resid is not None:
        io.write_table_csv(out / "residuals.csv", ("date", "residual"),
                           [(iso(d), float(v)) for d, v in zip(resid.dates, resid.values)])
        rows += [(d, "residual", v) for d, v in zip(resid.dates, resid.values)]
        artifacts.append(out / "residuals.csv")
    io.write_long_csv(out / "fit_plot.csv", rows)
    summary = {"model": _ROW_NAME[name], "train_start": iso(series.start),
               "train_end": iso(series.end), "data": _data_args(cfg), "seed": cfg.seed}
    lin = model.linear if isinstance(model, hybrid.HybridModel) else model
    if isinstance(lin, sarimax.SarimaxFit):
        summary.update(order=str(lin.order), aic=lin.aic, bic=lin.bic, loglik=lin.loglik,
                       converged=lin.converged)
    io.write_json(out / "fit.json", summary)
    return {"command": "fit", **summary, "artifacts": [str(a) for a in artifacts]}


def _future_frame(cfg: RunConfig, last_day: int, horizon: int) -> tuple:
    series, frame = load_data(cfg)
    if last_day + horizon > frame.dates[-1]:
        raise SeriesError(f"data ends {iso(int(frame.dates[-1]))}; a {horizon}-day forecast "
                          f"from {iso(last_day)} needs weather through {iso(last_day + horizon)}")
    future = frame.slice_dates(last_day + 1, last_day + horizon)
    actual = None
    if series.end >= last_day + 1:
        actual = series.slice_dates(last_day + 1, min(series.end, last_day + horizon))
    return future, actual


def _last_day(model) -> int:
    if isinstance(model, sarimax.SarimaxFit):
        return model.series.end
    return model.last_day


def cmd_forecast(args) -> dict:
    """Dynamic forecast from a saved model over the days after its training period."""
    cfg_args = argparse.Namespace(**vars(args))
    out_dir = RunConfig(output=args.out or "").output_dir()
    model_file = Path(args.model_file) if args.model_file else out_dir / "model.json"
    model = io.load_model(model_file)
    manifest_path = model_file.parent / "fit.json"
    if not any(getattr(args, k, None) for k in ("config", "load", "weather", "synth")) \
            and manifest_path.exists():
        data = io.read_json(manifest_path).get("data", {})
        for key, value in data.items():
            if getattr(cfg_args, key, None) is None and value not in ("", None):
                setattr(cfg_args, key, value)
    cfg = build_config(cfg_args)
    last = _last_day(model)
    future, actual = _future_frame(cfg, last, args.horizon)
    if isinstance(model, sarimax.SarimaxFit):
        pred, parts = sarimax.forecast_dynamic(model, args.horizon, future), None
    elif isinstance(model, hybrid.HybridModel):
        parts = hybrid.forecast_components(model, args.horizon, future)
        pred = parts.total
    elif isinstance(model, WindowForecaster):
        pred, parts = model.forecast(args.horizon, future), None
    else:
        raise CliError(f"unsupported model in {model_file}")
    out = _ensure_out(cfg)
    actual_map = dict(zip(actual.dates.tolist(), actual.values.tolist())) if actual else {}
    io.write_table_csv(out / "forecast.csv", ("date", "actual", "predicted"),
                       [(iso(d), actual_map.get(int(d)), float(v))
                        for d, v in zip(pred.dates, pred.values)])
    rows = [(d, "actual", v) for d, v in actual_map.items()]
    rows += [(d, "predicted", v) for d, v in zip(pred.dates, pred.values)]
    if parts is not None:
        rows += [(d, "linear", v) for d, v in zip(parts.linear.dates, parts.linear.values)]
        rows += [(d, "residual", v) for d, v in zip(parts.residual.dates, parts.residual.values)]
    io.write_long_csv(out / "forecast_plot.csv", rows)
    summary = {"command": "forecast", "horizon": args.horizon, "start": iso(pred.start),
               "end": iso(pred.end),
               "artifacts": [str(out / "forecast.csv"), str(out / "forecast_plot.csv")]}
    if actual is not None and len(actual) == len(pred):
        summary["metrics"] = evaluation.metrics(actual, pred).to_dict()
    return summary


def write_benchmark(report: evaluation.BenchmarkReport, out: Path) -> list:
    """Write report.{txt,csv,json}, forecasts.csv, residuals.csv and plot.csv."""
    (out / "report.txt").write_text(report.to_text(), encoding="utf-8")
    io.write_table_csv(out / "report.csv", evaluation.REPORT_COLUMNS, report.table_rows())
    io.write_json(out / "report.json", report.to_dict())
    names = [r.model for r in report.rows]
    preds = {r.model: r.forecast for r in report.rows}
    table = []
    for i, d in enumerate(report.actual.dates):
        row = [iso(d), float(report.actual.values[i])]
        row += [float(preds[n].values[i]) if preds[n] is not None else None for n in names]
        table.append(row)
    io.write_table_csv(out / "forecasts.csv", ["date", "actual"] + names, table)
    long_rows = [(d, "actual", v) for d, v in zip(report.actual.dates, report.actual.values)]
    for n in names:
        if preds[n] is not None:
            long_rows += [(d, n, v) for d, v in zip(preds[n].dates, preds[n].values)]
    for n, parts in report.components.items():
        long_rows += [(d, f"{n}:linear", v) for d, v in zip(parts.linear.dates,
                                                             parts.linear.values)]
        long_rows += [(d, f"{n}:residual", v) for d, v in zip(parts.residual.dates,
                                                               parts.residual.values)]
    artifacts = ["report.txt", "report.csv", "report.json", "forecasts.csv", "plot.csv"]
    if report.linear_residuals is not None:
        r = report.linear_residuals
        io.write_table_csv(out / "residuals.csv", ("date", "residual"),
                           [(iso(d), float(v)) for d, v in zip(r.dates, r.values)])
        long_rows += [(d, "SARIMAX:train_residual", v) for d, v in zip(r.dates, r.values)]
        artifacts.append("residuals.csv")
    io.write_long_csv(out / "plot.csv", long_rows)
    return [str(out / a) for a in artifacts]


def cmd_benchmark(args) -> dict:
    """Fit the model roster on the training period and score test-period forecasts."""
    cfg = build_config(args)
    train, test = train_test(cfg)
    report = evaluation.benchmark(train, test, cfg.models, cfg.settings())
    out = _ensure_out(cfg)
    artifacts = write_benchmark(report, out)
    sys.stdout.write(report.to_text())
    failed = [r.model for r in report.rows if not r.ok]
    return {"command": "benchmark", "models": len(report.rows), "failed": failed,
            "best": report.ranked()[0].model, "artifacts": artifacts,
            "_status": 1 if failed else 0}


def cmd_gridsearch(args) -> dict:
    """Cross-validated exhaustive hyperparameter search for one model kind."""
    cfg = build_config(args)
    linear, kind = _model_name(args.model)
    if kind is None:
        raise ConfigError("grid search applies to mlp, svr or lstm (SARIMAX orders are "
                          "chosen by AIC/BIC)")
    if not cfg.grids.get(kind):
        raise ConfigError(f"no grid given for {kind}; use --grid {kind}.KEY=V1,V2 "
                          f"or a [grid.{kind}] config section")
    (series, frame), _ = train_test(cfg)
    if linear:
        lin = sarimax.fit(series, frame, sarimax.SarimaxOrder.parse(cfg.order)) if cfg.order \
            else sarimax.select_order(series, frame, cfg.sarimax_grid, cfg.criterion)
        series = sarimax.residuals(lin)
        frame = frame.slice_dates(series.start, series.end)
    base = dict(cfg.params.get(kind, {}))
    if kind != "svr":
        base.setdefault("seed", cfg.seed)
    result = evaluation.grid_search(kind, GridSpec(cfg.grids[kind]), series, frame, cfg.folds,
                                    cfg.seed, cfg.cv_criterion, base=base, workers=cfg.workers)
    out = _ensure_out(cfg)
    axes = list(GridSpec(cfg.grids[kind]).axes)
    header = axes + ["score"] + [f"fold{i}" for i in range(cfg.folds)] + ["error"]
    rows = []
    for row in result.table:
        folds = row["fold_scores"] or [None] * cfg.folds
        rows.append([_cell(row["params"][a]) for a in axes] + [row["score"]] + list(folds)
                    + [row["error"]])
    io.write_table_csv(out / "gridsearch.csv", header, rows)
    payload = {"model": kind, "criterion": result.criterion, "folds": cfg.folds,
               "best": {k: _cell(v) for k, v in result.best.items()},
               "best_score": result.best_score,
               "table": [{"params": {k: _cell(v) for k, v in r["params"].items()},
                          "score": r["score"], "fold_scores": r["fold_scores"],
                          "error": r["error"]} for r in result.table]}
    io.write_json(out / "gridsearch.json", payload)
    return {"command": "gridsearch", "best": payload["best"], "best_score": result.best_score,
            "artifacts": [str(out / "gridsearch.csv"), str(out / "gridsearch.json")]}


def _cell(v):
    if isinstance(v, tuple):
        return "-".join(str(x) for x in v)
    if isinstance(v, (int, float, str)):
        return v
    return str(v)


def cmd_evaluate(args) -> dict:
    """Accuracy metrics of a prediction file against an actuals file."""
    actual = io.read_prediction_csv(args.actual, args.actual_column)
    predicted = io.read_prediction_csv(args.predicted, args.predicted_column)
    if not np.array_equal(actual.dates, predicted.dates):
        lo, hi = max(actual.start, predicted.start), min(actual.end, predicted.end)
        if lo > hi:
            raise SeriesError("actual and predicted files share no dates")
        actual, predicted = actual.slice_dates(lo, hi), predicted.slice_dates(lo, hi)
    report = evaluation.metrics(actual, predicted).to_dict()
    result = {"command": "evaluate", "n": len(actual), "metrics": report}
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        io.write_json(out / "metrics.json", report)
        result["artifacts"] = [str(out / "metrics.json")]
    return result


# -- entry point ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="peakload",
        description="Daily peak-load forecasting with SARIMAX, NARX-MLP, SVR, LSTM and "
                    "SARIMAX hybrids.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write the synthetic dataset as CSV files",
                       description="Write a seeded synthetic load/weather/holiday dataset in "
                                   "the CSV schemas the other commands read.")
    p.add_argument("--days", type=int, help="number of days (default 2190)")
    p.add_argument("--nonlin-amp", type=float, help="amplitude of the nonlinear temperature "
                                                    "term in MW (default -2500)")
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("fit", help="fit one model on the training period",
                       description="Fit SARIMAX (fixed order or AIC/BIC search), a window "
                                   "model (mlp/ann, svr, lstm) or a SARIMAX hybrid "
                                   "(sarimax-mlp, sarimax-svr, sarimax-lstm) and save it.")
    p.add_argument("--model", required=True, help="model name, e.g. sarimax or sarimax-lstm")
    p.add_argument("--order", help="SARIMAX order p,d,q,P,D,Q,S (default: order search)")
    p.add_argument("--criterion", choices=["aic", "bic"], help="order search criterion")
    p.add_argument("--param", action="append", metavar="KIND.KEY=VALUE",
                   help="model hyperparameter, e.g. mlp.epochs=100 (repeatable)")
    p.add_argument("--grid", action="append", metavar="KIND.KEY=V1,V2",
                   help="tune by cross-validated grid search before fitting (repeatable)")
    _add_data_options(p)
    _add_common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("forecast", help="dynamic forecast from a saved model",
                       description="Roll a saved model forward over the days after its "
                                   "training period, feeding forecasts back as lags.")
    p.add_argument("--horizon", type=int, required=True, help="number of days to forecast")
    p.add_argument("--model-file", help="saved model (default OUT/model.json)")
    _add_data_options(p)
    _add_common(p)
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser("benchmark", help="fit and score the full model roster",
                       description="Fit every roster model on the training period, forecast "
                                   "the test period dynamically and write the comparison "
                                   "report with published reference values for context.")
    p.add_argument("--models", help=f"comma separated roster (default {','.join(MODEL_NAMES)})")
    p.add_argument("--order", help="fixed SARIMAX order instead of the AIC search")
    p.add_argument("--criterion", choices=["aic", "bic"], help="order search criterion")
    p.add_argument("--param", action="append", metavar="KIND.KEY=VALUE",
                   help="model hyperparameter, e.g. lstm.hidden_size=32 (repeatable)")
    p.add_argument("--grid", action="append", metavar="KIND.KEY=V1,V2",
                   help="grid searched by stratified cross validation (repeatable)")
    p.add_argument("--timing", action="store_true",
                   help="record wall-clock seconds per model (makes reports non-reproducible)")
    _add_data_options(p)
    _add_common(p)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("gridsearch", help="cross-validated hyperparameter search",
                       description="Exhaustive grid search scored by stratified k-fold cross "
                                   "validation on one-step window predictions.")
    p.add_argument("--model", required=True, help="mlp/ann, svr, lstm, or a sarimax-* hybrid "
                                                  "(searches the residual model)")
    p.add_argument("--grid", action="append", metavar="KIND.KEY=V1,V2",
                   help="grid axis (repeatable)")
    p.add_argument("--param", action="append", metavar="KIND.KEY=VALUE",
                   help="fixed hyperparameter shared by all cells (repeatable)")
    p.add_argument("--order", help="SARIMAX order for hybrid residuals")
    _add_data_options(p)
    _add_common(p)
    p.set_defaults(func=cmd_gridsearch)

    p = sub.add_parser("evaluate", help="metrics of a prediction file",
                       description="RMSE, MSE, MAE, MAPE and predictive R^2 of predicted "
                                   "against actual values read from date-indexed CSV files.")
    p.add_argument("--actual", required=True, help="CSV with a date column")
    p.add_argument("--predicted", required=True, help="CSV with a date column")
    p.add_argument("--actual-column", help="value column of --actual (needed when the file "
                                           "has more than one)")
    p.add_argument("--predicted-column", help="value column of --predicted")
    p.add_argument("--out", help="also write metrics.json here")
    p.add_argument("-v", "--verbose", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else
                        logging.ERROR, format="%(levelname)s %(name)s: %(message)s")
    try:
        result = args.func(args)
    except Exception as exc:  # noqa: BLE001 - every failure becomes a JSON error
        if getattr(args, "verbose", False):
            logger.exception("command failed")
        err = {"error": {"command": args.command, "type": type(exc).__name__,
                         "message": str(exc)}}
        sys.stderr.write(json.dumps(err) + "\n")
        return 1
    status = result.pop("_status", 0)
    sys.stdout.write(json.dumps(result, indent=2) + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
