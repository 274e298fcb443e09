"""CSV ingestion and emission, JSON model envelopes.

Load CSV: ``date,peak_mw``. Weather CSV: ``date,tmean_c,humidity_pct``.
Both are UTF-8, comma separated, with a header row and one row per day.
Floats are written with ``repr`` so files re-ingest bit-identically.
"""

from __future__ import annotations

import csv
import io as _io
import json
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .features import FeatureFrame, HolidayCalendar, WeatherRow, build_frame, korean_holidays
from .series import SeriesError, TimeSeries, check_contiguous, iso, to_day

LOAD_HEADER = ("date", "peak_mw")
WEATHER_HEADER = ("date", "tmean_c", "humidity_pct")
ENVELOPE_FORMAT = "peakload-model"
ENVELOPE_VERSION = 1


# -- dict helpers ----------------------------------------------------------

def series_to_dict(series: TimeSeries) -> dict:
    return {"start": iso(series.start), "values": series.values.tolist()}


def series_from_dict(d: Mapping) -> TimeSeries:
    return TimeSeries.from_values(d["values"], d["start"])


def frame_to_dict(frame: FeatureFrame) -> dict:
    return {"start": iso(frame.start), "n": len(frame),
            "columns": {k: v.tolist() for k, v in frame.columns.items()}}


def frame_from_dict(d: Mapping) -> FeatureFrame:
    start = to_day(d["start"])
    return FeatureFrame(np.arange(start, start + int(d["n"]), dtype=np.int64),
                        {k: np.asarray(v, dtype=float) for k, v in d["columns"].items()})


# -- CSV -------------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def _rows(path, header: Sequence[str]) -> list:
    """Parse a headed CSV into (lineno, date, floats...) tuples."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            got = tuple(c.strip() for c in next(reader))
        except StopIteration:
            raise SeriesError(f"{path}: empty file") from None
        if got != tuple(header):
            raise SeriesError(f"{path}:1: expected header {','.join(header)}, got {','.join(got)}")
        out = []
        for row in reader:
            lineno = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise SeriesError(
                    f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                day = to_day(row[0].strip())
                nums = tuple(float(c) for c in row[1:])
            except ValueError as exc:
                raise SeriesError(f"{path}:{lineno}: malformed row ({exc})") from None
            if not all(np.isfinite(nums)):
                raise SeriesError(f"{path}:{lineno}: non-finite value")
            out.append((lineno, day) + nums)
    if not out:
        raise SeriesError(f"{path}: no data rows")
    dates = np.array([r[1] for r in out], dtype=np.int64)
    try:
        check_contiguous(dates, str(path))
    except SeriesError as exc:
        raise SeriesError(str(exc)) from None
    return out


def read_load_csv(path) -> TimeSeries:
    rows = _rows(path, LOAD_HEADER)
    return TimeSeries(np.array([r[1] for r in rows], dtype=np.int64), [r[2] for r in rows])


def read_weather_csv(path) -> list:
    return [WeatherRow(r[1], r[2], r[3]) for r in _rows(path, WEATHER_HEADER)]


def _write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def write_load_csv(path, series: TimeSeries) -> None:
    _write_csv(path, LOAD_HEADER, ((iso(d), _fmt(v)) for d, v in zip(series.dates, series.values)))


def write_weather_csv(path, weather: Sequence[WeatherRow]) -> None:
    _write_csv(path, WEATHER_HEADER,
               ((iso(to_day(r[0])), _fmt(r[1]), _fmt(r[2])) for r in weather))


def write_holidays(path, cal: HolidayCalendar) -> None:
    Path(path).write_text(cal.to_text(), encoding="utf-8")


def join_weather(series: TimeSeries, weather: Sequence[WeatherRow], cal: HolidayCalendar,
                 ) -> FeatureFrame:
    """Build the feature frame for exactly the days of ``series``."""
    load_days = set(series.dates.tolist())
    weather_days = {to_day(r[0]) for r in weather}
    missing = sorted(load_days - weather_days)
    extra = sorted(weather_days - load_days)
    if missing or extra:
        parts = []
        if missing:
            parts.append("no weather for " + ", ".join(iso(d) for d in missing[:10])
                         + (" ..." if len(missing) > 10 else ""))
        if extra:
            parts.append("no load for " + ", ".join(iso(d) for d in extra[:10])
                         + (" ..." if len(extra) > 10 else ""))
        raise SeriesError("load and weather dates differ: " + "; ".join(parts))
    return build_frame(sorted(weather, key=lambda r: to_day(r[0])), cal)


def load_csv(load_path, weather_path, holiday_path=None) -> tuple:
    """Read and date-join the load and weather files.

    Without ``holiday_path`` the bundled Korean holiday list is used.
    """
    series = read_load_csv(load_path)
    weather = read_weather_csv(weather_path)
    cal = korean_holidays() if holiday_path is None else HolidayCalendar.read(holiday_path)
    return series, join_weather(series, weather, cal)


def write_long_csv(path, rows: Iterable[tuple]) -> None:
    """Plot-ready long format: ``date,series_name,value``."""
    _write_csv(path, ("date", "series_name", "value"),
               ((iso(d), name, _fmt(v)) for d, name, v in rows))


def read_long_csv(path) -> list:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != ("date", "series_name", "value"):
            raise SeriesError(f"{path}: not a long-format file")
        return [(to_day(d), n, float(v)) for d, n, v in reader]


def write_table_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    def cell(x):
        if x is None:
            return ""
        if isinstance(x, float):
            return _fmt(x)
        return str(x)
    _write_csv(path, header, ([cell(c) for c in row] for row in rows))


def read_table_csv(path) -> tuple:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return tuple(header), [row for row in reader]


def read_prediction_csv(path, column: str | None = None) -> TimeSeries:
    """Read one value column of a ``date,...`` file.

    Without ``column`` the file must have exactly two columns and the second is
    read, whatever its name.
    """
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader, None) or []]
        if not header or header[0] != "date":
            raise SeriesError(f"{path}:1: expected a header starting with 'date'")
        if column is None:
            if len(header) != 2:
                raise SeriesError(f"{path}:1: {len(header) - 1} value columns "
                                  f"({', '.join(header[1:])}); choose one")
            idx = 1
        elif column in header[1:]:
            idx = header.index(column, 1)
        else:
            raise SeriesError(f"{path}:1: no column {column!r}; have {', '.join(header[1:])}")
        dates, values = [], []
        for row in reader:
            if not row:
                continue
            try:
                dates.append(to_day(row[0].strip()))
                values.append(float(row[idx]))
            except (ValueError, IndexError) as exc:
                raise SeriesError(f"{path}:{reader.line_num}: malformed row ({exc})") from None
    if not dates:
        raise SeriesError(f"{path}: no data rows")
    return TimeSeries(dates, values)


# -- JSON ------------------------------------------------------------------

def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def envelope(kind: str, payload: Mapping) -> dict:
    return {"format": ENVELOPE_FORMAT, "version": ENVELOPE_VERSION, "kind": kind,
            "model": payload}


def open_envelope(d: Mapping) -> tuple:
    if d.get("format") != ENVELOPE_FORMAT:
        raise ValueError("not a peakload model file")
    if d.get("version") != ENVELOPE_VERSION:
        raise ValueError(f"unsupported model file version {d.get('version')!r}")
    return d["kind"], d["model"]


def save_model(path, model) -> None:
    """Write any fitted model (SARIMAX, window forecaster or hybrid) as an envelope."""
    write_json(path, model_to_envelope(model))


def load_model(path):
    return model_from_envelope(read_json(path))


def model_to_envelope(model) -> dict:
    from . import hybrid, sarimax
    from .models import WindowForecaster
    if isinstance(model, sarimax.SarimaxFit):
        return envelope("sarimax", sarimax.to_envelope_dict(model))
    if isinstance(model, WindowForecaster):
        return envelope(model.kind, model.to_dict())
    if isinstance(model, hybrid.HybridModel):
        return envelope("hybrid", model.to_dict())
    raise TypeError(f"cannot serialise {type(model).__name__}")


def model_from_envelope(d: Mapping):
    from . import hybrid, sarimax
    from .models import WindowForecaster
    kind, payload = open_envelope(d)
    if kind == "sarimax":
        return sarimax.from_envelope_dict(payload)
    if kind == "hybrid":
        return hybrid.HybridModel.from_dict(payload)
    return WindowForecaster.from_dict(payload)
