"""Daily time-series containers, differencing, splitting and column scaling.

Dates are stored as ``int64`` days since 1970-01-01 so that every join
between load, weather and calendar data happens by date rather than by
position.
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

EPOCH = _dt.date(1970, 1, 1)


class SeriesError(ValueError):
    """Raised when a container invariant or an operation precondition fails."""


def to_day(value) -> int:
    """Convert a ``date``, ISO string or integer day number to days since epoch."""
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, str):
        value = _dt.date.fromisoformat(value.strip())
    if isinstance(value, _dt.datetime):
        value = value.date()
    if isinstance(value, _dt.date):
        return (value - EPOCH).days
    raise TypeError(f"cannot interpret {value!r} as a date")


def to_date(day: int) -> _dt.date:
    return EPOCH + _dt.timedelta(days=int(day))


def iso(day: int) -> str:
    return to_date(day).isoformat()


def day_range(start, n: int) -> np.ndarray:
    first = to_day(start)
    return np.arange(first, first + n, dtype=np.int64)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


def check_contiguous(dates: np.ndarray, what: str = "series") -> None:
    """Raise unless ``dates`` advance by exactly one day, naming the first defect."""
    if dates.size < 2:
        return
    steps = np.diff(dates)
    bad = np.flatnonzero(steps != 1)
    if bad.size:
        i = int(bad[0])
        prev, nxt = int(dates[i]), int(dates[i + 1])
        if nxt == prev:
            raise SeriesError(f"{what}: duplicate date {iso(nxt)}")
        if nxt < prev:
            raise SeriesError(f"{what}: dates out of order at {iso(nxt)}")
        missing = [iso(d) for d in range(prev + 1, min(nxt, prev + 6))]
        raise SeriesError(f"{what}: missing date(s) {', '.join(missing)}"
                          + (" ..." if nxt - prev > 6 else ""))


@dataclass(frozen=True)
class TimeSeries:
    """Daily series of real values, e.g. peak load in MW."""

    dates: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype=np.int64).ravel()
        values = np.asarray(self.values, dtype=float).ravel()
        if dates.size == 0:
            raise SeriesError("series must contain at least one value")
        if dates.size != values.size:
            raise SeriesError(f"{dates.size} dates but {values.size} values")
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise SeriesError(f"non-finite value at {iso(dates[bad])}")
        check_contiguous(dates)
        object.__setattr__(self, "dates", _frozen(dates))
        object.__setattr__(self, "values", _frozen(values))

    @classmethod
    def from_values(cls, values: Sequence[float], start="2000-01-01") -> "TimeSeries":
        values = np.asarray(values, dtype=float)
        return cls(day_range(start, values.size), values)

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def start(self) -> int:
        return int(self.dates[0])

    @property
    def end(self) -> int:
        return int(self.dates[-1])

    def slice_dates(self, first: int, last: int) -> "TimeSeries":
        """Inclusive date slice."""
        i = first - self.start
        j = last - self.start + 1
        if i < 0 or j > len(self) or i >= j:
            raise SeriesError(f"date slice {iso(first)}..{iso(last)} outside series")
        return TimeSeries(self.dates[i:j], self.values[i:j])

    def tail(self, n: int) -> "TimeSeries":
        return TimeSeries(self.dates[-n:], self.values[-n:])

    def with_values(self, values) -> "TimeSeries":
        return TimeSeries(self.dates, values)


@dataclass(frozen=True)
class SplitSpec:
    """Train/test split; ``cutoff`` is the last training day (inclusive)."""

    cutoff: int

    def __post_init__(self):
        object.__setattr__(self, "cutoff", to_day(self.cutoff))


def _poly_coeffs(d: int, D: int, S: int) -> np.ndarray:
    """Coefficients of (1-B)^d (1-B^S)^D in ascending powers of B."""
    poly = np.array([1.0])
    for _ in range(d):
        poly = np.convolve(poly, [1.0, -1.0])
    seasonal = np.zeros(S + 1)
    seasonal[0], seasonal[S] = 1.0, -1.0
    for _ in range(D):
        poly = np.convolve(poly, seasonal)
    return poly


def difference_values(values: np.ndarray, d: int, D: int, S: int) -> np.ndarray:
    """Apply (1-B)^d (1-B^S)^D along axis 0, dropping the consumed head."""
    values = np.asarray(values, dtype=float)
    out = values
    for _ in range(d):
        out = out[1:] - out[:-1]
    for _ in range(D):
        out = out[S:] - out[:-S]
    return out


def difference(series: TimeSeries, d: int, D: int = 0, S: int = 1) -> TimeSeries:
    """Differenced series; output dates are the last ``len - d - D*S`` input dates."""
    if d < 0 or D < 0 or S < 1:
        raise SeriesError(f"invalid differencing orders d={d}, D={D}, S={S}")
    lost = d + D * S
    if len(series) <= lost:
        raise SeriesError(f"series of length {len(series)} too short for d={d}, D={D}, S={S}")
    return TimeSeries(series.dates[lost:], difference_values(series.values, d, D, S))


def integrate_values(diff: np.ndarray, seed: np.ndarray, d: int, D: int, S: int) -> np.ndarray:
    """Invert :func:`difference_values` given the ``d + D*S`` leading observations.

    The recursion ``x_t = w_t - sum_{j>=1} c_j x_{t-j}`` uses the expanded
    differencing polynomial, so it is exact for any mix of regular and
    seasonal orders.
    """
    poly = _poly_coeffs(d, D, S)
    lost = poly.size - 1
    seed = np.asarray(seed, dtype=float)
    if seed.shape[0] != lost:
        raise SeriesError(f"seed must hold {lost} values, got {seed.shape[0]}")
    diff = np.asarray(diff, dtype=float)
    out = np.empty((lost + diff.shape[0],) + diff.shape[1:])
    out[:lost] = seed
    lag_coeffs = -poly[1:]
    for t in range(diff.shape[0]):
        k = lost + t
        acc = diff[t]
        for j in range(1, lost + 1):
            if lag_coeffs[j - 1] != 0.0:
                acc = acc + lag_coeffs[j - 1] * out[k - j]
        out[k] = acc
    return out


def integrate(diff: TimeSeries, seed_values: Sequence[float], d: int, D: int = 0,
              S: int = 1) -> TimeSeries:
    """Rebuild the level series from a differenced series and its seed values."""
    lost = d + D * S
    values = integrate_values(diff.values, np.asarray(seed_values, dtype=float), d, D, S)
    dates = np.arange(diff.start - lost, diff.end + 1, dtype=np.int64)
    return TimeSeries(dates, values)


def split(series: TimeSeries, frame, spec: SplitSpec):
    """Split a date-aligned (series, frame) pair at ``spec.cutoff``.

    Returns ``((train_series, train_frame), (test_series, test_frame))``.
    """
    frame.require_aligned(series)
    cut = spec.cutoff
    if not (series.start <= cut < series.end):
        raise SeriesError(
            f"cutoff {iso(cut)} must lie in [{iso(series.start)}, {iso(series.end)}) "
            "so that both partitions are non-empty")
    k = cut - series.start + 1
    train = (TimeSeries(series.dates[:k], series.values[:k]), frame.take(slice(0, k)))
    test = (TimeSeries(series.dates[k:], series.values[k:]), frame.take(slice(k, None)))
    return train, test


@dataclass(frozen=True)
class ColumnScaler:
    """Per-column standardisation with the population (1/N) standard deviation."""

    names: tuple
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, columns: Mapping[str, Iterable[float]]) -> "ColumnScaler":
        names, means, stds = [], [], []
        for name, col in columns.items():
            col = np.asarray(col, dtype=float)
            sd = float(np.std(col))
            if not sd > 0.0:
                raise SeriesError(f"column {name!r} is constant; cannot scale")
            names.append(name)
            means.append(float(np.mean(col)))
            stds.append(sd)
        return cls(tuple(names), np.array(means), np.array(stds))

    def _index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"scaler has no column {name!r}") from None

    def apply(self, name: str, values) -> np.ndarray:
        i = self._index(name)
        return (np.asarray(values, dtype=float) - self.mean[i]) / self.std[i]

    def invert(self, name: str, values) -> np.ndarray:
        i = self._index(name)
        return np.asarray(values, dtype=float) * self.std[i] + self.mean[i]

    def to_dict(self) -> dict:
        return {"names": list(self.names), "mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, d: Mapping) -> "ColumnScaler":
        return cls(tuple(d["names"]), np.asarray(d["mean"], float), np.asarray(d["std"], float))


def fit_scaler(frame) -> ColumnScaler:
    """Fit a scaler on every column of a feature frame (or a name->values mapping)."""
    columns = frame.columns if hasattr(frame, "columns") else frame
    return ColumnScaler.fit(columns)
