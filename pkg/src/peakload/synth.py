"""Seeded synthetic daily peak load with Korean-like seasonality.

Load rises in summer and winter and dips in spring and autumn, drops on
weekends and holidays, and carries AR(1) noise. An optional sinusoid of
temperature adds structure that a linear model in the regressors cannot
capture, which is what hybrid residual models are meant to pick up.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .features import HolidayCalendar, WeatherRow, build_frame, degree_days, korean_holidays
from .series import SplitSpec, TimeSeries, day_range, split, to_date, to_day

REFERENCE_SEED = 42
REFERENCE_DAYS = 2190
REFERENCE_TRAIN_DAYS = 1825


@dataclass(frozen=True)
class SynthConfig:
    """Generator settings; loads in MW, temperatures in degrees Celsius.

    The bimodal annual term is ``annual_amplitude_mw * ((T - comfort_c) / 15)**2``
    so it peaks in both the hottest and the coldest weeks.
    """

    n_days: int = REFERENCE_DAYS
    start: str = "2014-01-01"
    base_mw: float = 70000.0
    annual_amplitude_mw: float = 10000.0
    comfort_c: float = 6.0
    weekend_dip_mw: float = 3000.0
    holiday_dip_mw: float = 5000.0
    temp_sq_coeff: float = 0.0
    cdd_coeff: float = 300.0
    hdd_coeff: float = 150.0
    ar_coeff: float = 0.7
    nonlin_amp_mw: float = -2500.0
    nonlin_period_c: float = 25.0
    noise_sigma_mw: float = 1200.0
    temp_mean_c: float = 8.0
    temp_amp_c: float = 17.0
    temp_noise_c: float = 3.0
    temp_persistence: float = 0.7
    seed: int = REFERENCE_SEED

    def __post_init__(self):
        if not self.base_mw > 0:
            raise ValueError("base_mw must be positive")
        if self.noise_sigma_mw < 0 or self.temp_noise_c < 0:
            raise ValueError("noise levels must be non-negative")
        if not abs(self.ar_coeff) < 1 or not abs(self.temp_persistence) < 1:
            raise ValueError("|ar_coeff| and |temp_persistence| must be below 1")
        if self.n_days < 1:
            raise ValueError("n_days must be positive")
        if self.nonlin_period_c <= 0:
            raise ValueError("nonlin_period_c must be positive")


def seasonal_phase(dates: np.ndarray) -> np.ndarray:
    """Fraction of the year elapsed since mid January, in radians."""
    doy = np.array([to_date(int(d)).timetuple().tm_yday for d in dates], dtype=float)
    return 2.0 * np.pi * (doy - 15.0) / 365.25


def load_formula(config: SynthConfig, tmean: np.ndarray, weekend: np.ndarray,
                 holiday: np.ndarray) -> np.ndarray:
    """Noise-free load for given weather and calendar flags."""
    t = np.asarray(tmean, dtype=float)
    cdd, hdd = degree_days(t)
    return (config.base_mw
            + config.annual_amplitude_mw * ((t - config.comfort_c) / 15.0) ** 2
            + config.temp_sq_coeff * t * t
            + config.cdd_coeff * cdd + config.hdd_coeff * hdd
            - config.weekend_dip_mw * weekend
            - config.holiday_dip_mw * holiday
            + config.nonlin_amp_mw * np.sin(2.0 * np.pi * t / config.nonlin_period_c))


def generate(config: SynthConfig = SynthConfig(), calendar: HolidayCalendar | None = None):
    """Return ``(load series, weather rows, holiday calendar)``.

    Without ``calendar`` the bundled Korean holiday list is used.
    """
    cal = korean_holidays() if calendar is None else calendar
    rng = np.random.default_rng(config.seed)
    dates = day_range(config.start, config.n_days)
    phase = seasonal_phase(dates)
    n = dates.size
    # Weather anomalies persist for days: AR(1) with marginal sd temp_noise_c.
    shocks = rng.normal(0.0, config.temp_noise_c, n)
    rho = config.temp_persistence
    scaled = shocks * np.sqrt(1.0 - rho * rho)
    scaled[0] = shocks[0]
    anomaly = _ar1(scaled, rho)
    tmean = config.temp_mean_c - config.temp_amp_c * np.cos(phase) + anomaly
    humidity = np.clip(65.0 + 12.0 * np.sin(phase - 1.2) + rng.normal(0.0, 9.0, n), 10.0, 100.0)
    weather = [WeatherRow(int(d), float(t), float(h)) for d, t, h in zip(dates, tmean, humidity)]
    frame = build_frame(weather, cal)
    load = load_formula(config, tmean, frame.columns["weekend"], frame.columns["holiday"])
    z = _ar1(rng.normal(0.0, config.noise_sigma_mw, n), config.ar_coeff)
    return TimeSeries(dates, load + z), weather, cal


def _ar1(shocks: np.ndarray, coeff: float) -> np.ndarray:
    out = np.empty_like(shocks)
    prev = 0.0
    for t, s in enumerate(shocks):
        prev = coeff * prev + s
        out[t] = prev
    return out


def reference_config(seed: int = REFERENCE_SEED, **overrides) -> SynthConfig:
    return replace(SynthConfig(seed=seed), **overrides)


def reference_dataset(seed: int = REFERENCE_SEED, **overrides):
    """Fixed benchmark data: six years, the first five for training.

    Returns ``((train_series, train_frame), (test_series, test_frame))``.
    """
    config = reference_config(seed, **overrides)
    series, weather, cal = generate(config)
    frame = build_frame(weather, cal)
    n_train = config.n_days * REFERENCE_TRAIN_DAYS // REFERENCE_DAYS
    return split(series, frame, SplitSpec(to_day(series.dates[n_train - 1])))
