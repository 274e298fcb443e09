"""Exogenous regressors for daily peak load: temperature transforms, calendar flags
and Pearson screening."""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .series import SeriesError, TimeSeries, check_contiguous, iso, to_date, to_day

CDD_BASE_C = 24.0
HDD_BASE_C = 18.0

FEATURE_COLUMNS = ("tsq", "cdd", "hdd", "humidity", "weekend", "holiday")
FLAG_COLUMNS = ("weekend", "holiday")

STRONG_CORRELATION = 0.8
MODERATE_CORRELATION = 0.6


class WeatherRow(NamedTuple):
    date: int
    tmean_c: float
    humidity_pct: float


@dataclass(frozen=True)
class FeatureFrame:
    """Date-aligned named columns of regressors."""

    dates: np.ndarray
    columns: Mapping[str, np.ndarray]

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype=np.int64).ravel()
        cols = {}
        for name, col in self.columns.items():
            if name in cols:
                raise SeriesError(f"duplicate column {name!r}")
            col = np.array(col, dtype=float).ravel()
            if col.size != dates.size:
                raise SeriesError(f"column {name!r} has {col.size} rows, expected {dates.size}")
            if name in FLAG_COLUMNS and not np.all((col == 0.0) | (col == 1.0)):
                raise SeriesError(f"flag column {name!r} must contain only 0 or 1")
            if not np.all(np.isfinite(col)):
                raise SeriesError(f"column {name!r} has non-finite values")
            col.flags.writeable = False
            cols[name] = col
        check_contiguous(dates, "feature frame")
        dates.flags.writeable = False
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "columns", cols)

    def __len__(self) -> int:
        return int(self.dates.size)

    @property
    def names(self) -> tuple:
        return tuple(self.columns)

    @property
    def start(self) -> int:
        return int(self.dates[0])

    def matrix(self, names: Sequence[str] | None = None) -> np.ndarray:
        names = self.names if names is None else names
        if not names:
            return np.zeros((len(self), 0))
        return np.column_stack([self.columns[n] for n in names])

    def take(self, index) -> "FeatureFrame":
        return FeatureFrame(self.dates[index], {k: v[index] for k, v in self.columns.items()})

    def slice_dates(self, first: int, last: int) -> "FeatureFrame":
        i, j = first - self.start, last - self.start + 1
        if len(self) == 0 or i < 0 or j > len(self) or i >= j:
            raise SeriesError(f"frame has no rows for {iso(first)}..{iso(last)}")
        return self.take(slice(i, j))

    def select(self, names: Sequence[str]) -> "FeatureFrame":
        return FeatureFrame(self.dates, {n: self.columns[n] for n in names})

    def concat(self, other: "FeatureFrame") -> "FeatureFrame":
        if other.names != self.names:
            raise SeriesError("cannot concatenate frames with different columns")
        return FeatureFrame(np.concatenate([self.dates, other.dates]),
                            {n: np.concatenate([self.columns[n], other.columns[n]])
                             for n in self.names})

    def require_aligned(self, series: TimeSeries) -> None:
        if len(self) != len(series) or not np.array_equal(self.dates, series.dates):
            raise SeriesError(
                f"frame ({_span(self.dates)}) is not aligned with series ({_span(series.dates)})")

    def require_follows(self, last_day: int, horizon: int) -> None:
        """Check that the frame holds exactly ``horizon`` rows starting the day after ``last_day``."""
        if len(self) != horizon:
            raise SeriesError(f"future frame has {len(self)} rows, horizon is {horizon}")
        if horizon and self.start != last_day + 1:
            raise SeriesError(
                f"future frame starts {iso(self.start)}, expected {iso(last_day + 1)}")


def _span(dates) -> str:
    if len(dates) == 0:
        return "empty"
    return f"{iso(dates[0])}..{iso(dates[-1])}"


@dataclass(frozen=True)
class HolidayCalendar:
    days: frozenset = field(default_factory=frozenset)

    @classmethod
    def from_dates(cls, dates: Iterable) -> "HolidayCalendar":
        return cls(frozenset(to_day(d) for d in dates))

    @classmethod
    def read(cls, path) -> "HolidayCalendar":
        """Read one ISO date per line; ``#`` starts a comment."""
        return cls.parse(Path(path).read_text(encoding="utf-8"), str(path))

    @classmethod
    def parse(cls, text: str, source: str = "<holidays>") -> "HolidayCalendar":
        days = set()
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                day = to_day(line)
            except ValueError:
                raise SeriesError(f"{source}:{lineno}: not an ISO date: {line!r}") from None
            if day in days:
                raise SeriesError(f"{source}:{lineno}: duplicate holiday {line}")
            days.add(day)
        return cls(frozenset(days))

    def __contains__(self, day) -> bool:
        return to_day(day) in self.days

    def __len__(self) -> int:
        return len(self.days)

    def to_text(self) -> str:
        return "".join(f"{iso(d)}\n" for d in sorted(self.days))


def korean_holidays() -> HolidayCalendar:
    """Sample asset: Korean national holidays 2014-2019."""
    text = resources.files("peakload.data").joinpath("korean_holidays_2014_2019.txt").read_text(
        encoding="utf-8")
    return HolidayCalendar.parse(text, "korean_holidays_2014_2019.txt")


def degree_days(t_mean):
    """Cooling and heating degree days for daily mean temperature(s) in °C.

    Returns ``(cdd, hdd)`` with the 24 °C / 18 °C reference temperatures.
    """
    t = np.asarray(t_mean, dtype=float)
    cdd = np.where(t >= CDD_BASE_C, t - CDD_BASE_C, 0.0)
    hdd = np.where(t <= HDD_BASE_C, HDD_BASE_C - t, 0.0)
    if cdd.ndim == 0:
        return float(cdd), float(hdd)
    return cdd, hdd


def squared_temperature(t_mean):
    t = np.asarray(t_mean, dtype=float)
    out = t * t
    return float(out) if out.ndim == 0 else out


def calendar_flags(day, cal: HolidayCalendar) -> tuple:
    d = to_date(to_day(day))
    return int(d.weekday() >= 5), int(to_day(d) in cal)


def build_frame(weather: Sequence[WeatherRow], cal: HolidayCalendar) -> FeatureFrame:
    """Regressor frame with columns tsq, cdd, hdd, humidity, weekend, holiday.

    Raw temperature is deliberately left out: its sign of correlation with
    load flips between summer and winter.
    """
    if not weather:
        raise SeriesError("no weather rows")
    dates = np.array([to_day(r[0]) for r in weather], dtype=np.int64)
    check_contiguous(dates, "weather")
    t = np.array([r[1] for r in weather], dtype=float)
    hum = np.array([r[2] for r in weather], dtype=float)
    cdd, hdd = degree_days(t)
    flags = np.array([calendar_flags(int(d), cal) for d in dates], dtype=float).reshape(-1, 2)
    return FeatureFrame(dates, {
        "tsq": squared_temperature(t),
        "cdd": cdd,
        "hdd": hdd,
        "humidity": hum,
        "weekend": flags[:, 0],
        "holiday": flags[:, 1],
    })


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    syy = float(yc @ yc)
    if sxx == 0.0 or syy == 0.0:
        raise SeriesError("Pearson correlation undefined for a constant vector")
    r = float(xc @ yc) / np.sqrt(sxx * syy)
    return float(np.clip(r, -1.0, 1.0))


@dataclass(frozen=True)
class CorrelationReport:
    target_r: dict
    retained: dict
    threshold: float
    pairwise: dict

    def kept(self) -> list:
        return [n for n, keep in self.retained.items() if keep]

    def collinear_pairs(self, level: float = MODERATE_CORRELATION) -> list:
        return [(a, b, r) for (a, b), r in self.pairwise.items() if abs(r) > level]

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "target_r": self.target_r,
            "retained": self.retained,
            "pairwise": [{"a": a, "b": b, "r": r} for (a, b), r in self.pairwise.items()],
            "moderate_pairs": [[a, b] for a, b, _ in self.collinear_pairs(MODERATE_CORRELATION)],
            "strong_pairs": [[a, b] for a, b, _ in self.collinear_pairs(STRONG_CORRELATION)],
        }


def pearson_screen(frame: FeatureFrame, target: TimeSeries,
                   keep_threshold: float = 0.1) -> CorrelationReport:
    """Correlate every column with the target and with each other.

    Columns with ``|r| >= keep_threshold`` against the target are retained;
    pairwise correlations are kept for the 0.6 / 0.8 collinearity check.
    """
    frame.require_aligned(target)
    target_r, retained = {}, {}
    for name, col in frame.columns.items():
        if np.std(col) == 0.0:
            raise SeriesError(f"column {name!r} is constant")
        r = pearson(col, target.values)
        target_r[name] = r
        retained[name] = abs(r) >= keep_threshold
    names = frame.names
    pairwise = {}
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            pairwise[(a, b)] = pearson(frame.columns[a], frame.columns[b])
    return CorrelationReport(target_r, retained, keep_threshold, pairwise)
