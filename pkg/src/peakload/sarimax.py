"""Seasonal ARIMA with exogenous regressors, estimated by conditional sum of squares.

The model is a regression with SARIMA errors::

    phi(B) Phi(B^S) (w_t - mu - x_t' gamma) = theta(B) Theta(B^S) e_t,
    w_t = (1 - B)^d (1 - B^S)^D y_t,

with the exogenous columns differenced the same way as ``y``. Polynomials use
the ``1 - c_1 B - c_2 B^2 ...`` sign convention for both AR and MA parts.
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import optimize, signal

from .features import FeatureFrame
from .series import SeriesError, TimeSeries, difference_values, integrate_values

logger = logging.getLogger(__name__)

# Keeps transformed partial autocorrelations strictly inside (-1, 1).
_PACF_BOUND = 0.999


class SarimaxError(RuntimeError):
    pass


class ConvergenceError(SarimaxError):
    """Optimizer did not converge after all restarts; ``best`` holds the best fit found."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True, order=True)
class SarimaxOrder:
    p: int = 0
    d: int = 0
    q: int = 0
    P: int = 0
    D: int = 0
    Q: int = 0
    S: int = 7

    def __post_init__(self):
        for name in ("p", "d", "q", "P", "D", "Q"):
            if getattr(self, name) < 0:
                raise ValueError(f"order {name} must be non-negative")
        if self.S < 1:
            raise ValueError("seasonal period must be positive")

    @classmethod
    def parse(cls, text: str) -> "SarimaxOrder":
        """Parse ``"p,d,q,P,D,Q,S"`` (S optional, default 7)."""
        parts = [int(x) for x in str(text).replace(" ", "").split(",") if x]
        if len(parts) not in (6, 7):
            raise ValueError(f"order must be p,d,q,P,D,Q[,S], got {text!r}")
        return cls(*parts)

    @property
    def n_arma(self) -> int:
        return self.p + self.q + self.P + self.Q

    @property
    def lost(self) -> int:
        """Observations consumed by differencing."""
        return self.d + self.D * self.S

    @property
    def ar_degree(self) -> int:
        return self.p + self.P * self.S

    @property
    def ma_degree(self) -> int:
        return self.q + self.Q * self.S

    @property
    def burn(self) -> int:
        return max(self.ar_degree, self.ma_degree)

    def as_tuple(self) -> tuple:
        return (self.p, self.d, self.q, self.P, self.D, self.Q, self.S)

    def __str__(self) -> str:
        return f"({self.p},{self.d},{self.q})({self.P},{self.D},{self.Q})[{self.S}]"


@dataclass(frozen=True)
class SarimaxParams:
    phi: np.ndarray
    theta: np.ndarray
    Phi: np.ndarray
    Theta: np.ndarray
    mu: float
    gamma: np.ndarray
    sigma2: float = 1.0

    @classmethod
    def make(cls, phi=(), theta=(), Phi=(), Theta=(), mu=0.0, gamma=(), sigma2=1.0):
        arr = lambda v: np.atleast_1d(np.asarray(v, dtype=float)).ravel()
        return cls(arr(phi), arr(theta), arr(Phi), arr(Theta), float(mu), arr(gamma),
                   float(sigma2))

    def check(self, order: SarimaxOrder, n_exog: int) -> None:
        expected = dict(phi=order.p, theta=order.q, Phi=order.P, Theta=order.Q, gamma=n_exog)
        for name, n in expected.items():
            if getattr(self, name).size != n:
                raise ValueError(f"{name} has {getattr(self, name).size} entries, order needs {n}")

    def to_dict(self) -> dict:
        return {k: (v.tolist() if isinstance(v, np.ndarray) else v)
                for k, v in self.__dict__.items()}

    @classmethod
    def from_dict(cls, d: Mapping) -> "SarimaxParams":
        return cls.make(**d)


def lag_polynomial(coeffs: np.ndarray, seasonal_coeffs: np.ndarray, S: int) -> np.ndarray:
    """Ascending coefficients of (1 - sum c_j B^j)(1 - sum C_j B^{jS})."""
    short = np.concatenate([[1.0], -np.asarray(coeffs, float)])
    seasonal = np.zeros(len(seasonal_coeffs) * S + 1)
    seasonal[0] = 1.0
    for j, c in enumerate(seasonal_coeffs, 1):
        seasonal[j * S] = -c
    return np.convolve(short, seasonal)


def polynomial_root_moduli(coeffs) -> np.ndarray:
    """Moduli of the roots of 1 - c_1 z - ... - c_k z^k via its companion matrix."""
    c = np.asarray(coeffs, dtype=float)
    c = np.trim_zeros(c, "b")
    if c.size == 0:
        return np.array([])
    companion = np.zeros((c.size, c.size))
    companion[0, :] = c
    companion[1:, :-1] = np.eye(c.size - 1)
    eig = np.linalg.eigvals(companion)
    with np.errstate(divide="ignore"):
        return 1.0 / np.abs(eig)


def pacf_to_coeffs(u: np.ndarray) -> np.ndarray:
    """Map unconstrained values to coefficients of a stationary (invertible) polynomial.

    Partial autocorrelations ``r = 0.999 tanh(u)`` are run through the
    Durbin-Levinson recursion.
    """
    r = _PACF_BOUND * np.tanh(np.asarray(u, dtype=float))
    a = np.zeros(0)
    for k, rk in enumerate(r):
        a = np.concatenate([a - rk * a[::-1], [rk]])
    return a


def coeffs_to_pacf(a: np.ndarray) -> np.ndarray:
    """Inverse of :func:`pacf_to_coeffs` for coefficients inside the stationary region."""
    a = np.asarray(a, dtype=float).copy()
    r = np.zeros(a.size)
    for k in range(a.size - 1, -1, -1):
        rk = a[k]
        r[k] = rk
        if k:
            a = (a[:k] + rk * a[:k][::-1]) / (1.0 - rk * rk)
    return np.arctanh(np.clip(r / _PACF_BOUND, -1 + 1e-12, 1 - 1e-12))


def _unpack(order: SarimaxOrder, u: np.ndarray):
    i = 0
    parts = []
    for n in (order.p, order.q, order.P, order.Q):
        parts.append(pacf_to_coeffs(u[i:i + n]))
        i += n
    return parts


def _exog_matrix(frame: FeatureFrame | None, n: int) -> tuple:
    if frame is None or len(frame.names) == 0:
        return np.zeros((n, 0)), ()
    return frame.matrix(), frame.names


class _Design:
    """Differenced data and the linear filters shared by every objective evaluation."""

    def __init__(self, series: TimeSeries, frame: FeatureFrame | None, order: SarimaxOrder,
                 start: int = 0):
        if frame is not None:
            frame.require_aligned(series)
        lost = order.lost
        self.burn = max(order.burn, start - lost)
        if len(series) - lost <= self.burn + 1:
            raise SeriesError(
                f"series of length {len(series)} too short for order {order}")
        self.order = order
        X, self.exog_names = _exog_matrix(frame, len(series))
        self.w = difference_values(series.values, order.d, order.D, order.S)
        self.X = difference_values(X, order.d, order.D, order.S)
        self.m = self.w.size
        self.n_eff = self.m - self.burn
        # Columns: differenced target, intercept, differenced exog.
        self.cols = np.column_stack([self.w, np.ones(self.m), self.X])

    def filtered(self, ar: np.ndarray, ma: np.ndarray, cols: np.ndarray) -> np.ndarray:
        # The AR side is a short sparse FIR filter; shifted slices beat lfilter here.
        u = ar[0] * cols
        for j in np.flatnonzero(ar[1:]) + 1:
            u[j:] += ar[j] * cols[:-j]
        u[: ar.size - 1] = 0.0
        if ma.size > 1:
            u = signal.lfilter([1.0], ma, u, axis=0)
        return u

    def profile(self, ar: np.ndarray, ma: np.ndarray):
        """Best (mu, gamma) and their CSS for fixed ARMA polynomials."""
        F = self.filtered(ar, ma, self.cols)[self.burn:]
        target = F[:, 0]
        A = F[:, 1:]
        if A.shape[1] == 1:
            a = A[:, 0]
            aa = a @ a
            beta = np.array([(a @ target) / aa if aa > 0 else 0.0])
        else:
            beta, *_ = np.linalg.lstsq(A, target, rcond=None)
        e = target - A @ beta
        return beta, float(e @ e)


def _polys(params: SarimaxParams, S: int):
    return (lag_polynomial(params.phi, params.Phi, S),
            lag_polynomial(params.theta, params.Theta, S))


def _innovations(design: _Design, params: SarimaxParams) -> np.ndarray:
    """CSS one-step errors on the differenced index (zeros before the AR burn-in)."""
    ar, ma = _polys(params, design.order.S)
    z = design.w - params.mu - design.X @ params.gamma
    return design.filtered(ar, ma, z[:, None])[:, 0]


def css_objective(order: SarimaxOrder, params: SarimaxParams, series: TimeSeries,
                  frame: FeatureFrame | None = None) -> float:
    """Conditional sum of squared one-step errors of the SARMA recursion.

    Pre-sample errors are zero and the first ``max(p + P*S, q + Q*S)``
    differenced observations are excluded from the sum.
    """
    design = _Design(series, frame, order)
    params.check(order, design.X.shape[1])
    e = _innovations(design, params)[design.burn:]
    return float(e @ e)


@dataclass(frozen=True)
class OptConfig:
    restarts: int = 5
    max_evals: int = 10_000
    ftol: float = 1e-10
    step: float = 0.5
    seed: int = 0


@dataclass(frozen=True)
class SarimaxFit:
    order: SarimaxOrder
    params: SarimaxParams
    loglik: float
    aic: float
    bic: float
    n_eff: int
    k: int
    residuals: TimeSeries
    fitted: TimeSeries
    series: TimeSeries
    frame: FeatureFrame | None
    exog_names: tuple = ()
    converged: bool = True
    n_evals: int = 0
    leaderboard: tuple = field(default=(), compare=False)

    def criterion(self, name: str) -> float:
        return {"aic": self.aic, "bic": self.bic}[name]

    def ar_root_moduli(self) -> np.ndarray:
        ar = lag_polynomial(self.params.phi, self.params.Phi, self.order.S)
        return polynomial_root_moduli(-ar[1:])

    def ma_root_moduli(self) -> np.ndarray:
        ma = lag_polynomial(self.params.theta, self.params.Theta, self.order.S)
        return polynomial_root_moduli(-ma[1:])

    def diagnostics(self, nlags: int = 28) -> dict:
        """Residual ACF/PACF for visual identification; never used for selection."""
        r = self.residuals.values
        return {"acf": acf(r, nlags).tolist(), "pacf": pacf(r, nlags).tolist()}


def acf(x, nlags: int) -> np.ndarray:
    x = np.asarray(x, dtype=float) - np.mean(x)
    denom = float(x @ x)
    nlags = min(nlags, x.size - 1)
    return np.array([1.0] + [float(x[k:] @ x[:-k]) / denom for k in range(1, nlags + 1)])


def pacf(x, nlags: int) -> np.ndarray:
    """Partial autocorrelations by Durbin-Levinson on the sample ACF."""
    rho = acf(x, nlags)
    out = [1.0]
    a = np.zeros(0)
    for k in range(1, rho.size):
        num = rho[k] - a @ rho[1:k][::-1]
        den = 1.0 - a @ rho[1:k]
        rk = num / den if den != 0 else 0.0
        a = np.concatenate([a - rk * a[::-1], [rk]])
        out.append(rk)
    return np.array(out)


def evaluate_params(series: TimeSeries, frame: FeatureFrame | None, order: SarimaxOrder,
                    params: SarimaxParams, *, converged: bool = True,
                    n_evals: int = 0, start: int = 0) -> SarimaxFit:
    """Build a fit object (residuals, likelihood, criteria) for fixed parameters.

    ``params.sigma2`` is replaced by the CSS variance estimate. ``start``
    optionally pushes the first scored observation (an index into the level
    series) past the order's own burn-in.
    """
    design = _Design(series, frame, order, start)
    params.check(order, design.X.shape[1])
    e_all = _innovations(design, params)
    e = e_all[design.burn:]
    n = design.n_eff
    css = float(e @ e)
    sigma2 = css / n
    if sigma2 > 0:
        loglik = -0.5 * n * (math.log(2 * math.pi * sigma2) + 1.0)
    else:
        loglik = math.inf
    k = order.n_arma + 1 + design.X.shape[1] + 1
    first = order.lost + design.burn
    dates = series.dates[first:]
    resid = TimeSeries(dates, e)
    fitted = TimeSeries(dates, series.values[first:] - e)
    return SarimaxFit(
        order=order, params=replace(params, sigma2=sigma2), loglik=loglik,
        aic=2 * k - 2 * loglik, bic=k * math.log(n) - 2 * loglik, n_eff=n, k=k,
        residuals=resid, fitted=fitted, series=series, frame=frame,
        exog_names=design.exog_names, converged=converged, n_evals=n_evals)


def fit(series: TimeSeries, frame: FeatureFrame | None, order: SarimaxOrder,
        opt: OptConfig = OptConfig(), *, strict: bool = False, start: int = 0) -> SarimaxFit:
    """Estimate a SARIMAX model by conditional sum of squares.

    AR and MA coefficients are optimised in partial-autocorrelation space so
    every candidate is stationary and invertible; the intercept and
    exogenous coefficients are solved exactly by least squares for each
    candidate. The simplex search runs once from the white-noise point and
    then ``opt.restarts`` more times from seeded perturbations of the best
    point found so far.
    """
    design = _Design(series, frame, order, start)
    scale = float(np.var(design.w[design.burn:])) or 1.0
    S = order.S

    def polys(u):
        phi, theta, Phi, Theta = _unpack(order, u)
        return lag_polynomial(phi, Phi, S), lag_polynomial(theta, Theta, S)

    def objective(u):
        ar, ma = polys(u)
        _, css = design.profile(ar, ma)
        val = css / design.n_eff / scale
        return val if np.isfinite(val) else 1e300

    dim = order.n_arma
    rng = np.random.default_rng(opt.seed)
    best_u = np.zeros(dim)
    total_evals = 0
    converged = True
    if dim:
        best_f = objective(best_u)
        runs = []
        for run in range(opt.restarts + 1):
            x0 = best_u if run == 0 else best_u + rng.normal(0.0, opt.step, dim)
            simplex = np.vstack([x0, x0 + opt.step * np.eye(dim)])
            res = optimize.minimize(
                objective, x0, method="Nelder-Mead",
                options={"initial_simplex": simplex, "maxfev": opt.max_evals,
                         "maxiter": opt.max_evals, "fatol": opt.ftol, "xatol": np.inf})
            total_evals += int(res.nfev)
            runs.append((float(res.fun), bool(res.success)))
            if res.fun < best_f:
                best_u, best_f = np.array(res.x), float(res.fun)
        converged = any(ok and f <= best_f + opt.ftol for f, ok in runs)
    phi, theta, Phi, Theta = _unpack(order, best_u)
    ar, ma = lag_polynomial(phi, Phi, S), lag_polynomial(theta, Theta, S)
    beta, _ = design.profile(ar, ma)
    params = SarimaxParams.make(phi, theta, Phi, Theta, beta[0], beta[1:])
    result = evaluate_params(series, frame, order, params, converged=converged,
                             n_evals=total_evals, start=start)
    if not converged:
        msg = f"SARIMAX{order}: simplex did not converge in {opt.restarts + 1} runs"
        if strict:
            raise ConvergenceError(msg, result)
        logger.warning(msg)
    return result


def order_grid(p=(0,), d=(0,), q=(0,), P=(0,), D=(0,), Q=(0,), S=(7,)) -> list:
    return [SarimaxOrder(*o) for o in itertools.product(p, d, q, P, D, Q, S)]


def _tie_key(fit_: SarimaxFit, criterion: str):
    return (fit_.criterion(criterion), fit_.k, fit_.order.as_tuple())


def select_order(series: TimeSeries, frame: FeatureFrame | None,
                 grid: Iterable[SarimaxOrder] | Mapping, criterion: str = "aic",
                 opt: OptConfig = OptConfig(), workers: int = 1) -> SarimaxFit:
    """Fit every order in ``grid`` and return the one minimising ``criterion``.

    Ties go to fewer parameters, then to the lexicographically smaller order.
    Every candidate is scored on the same observations (those after the
    largest differencing loss plus burn-in in the grid) so that likelihoods
    are comparable. The full leaderboard is attached to the returned fit.
    """
    if criterion not in ("aic", "bic"):
        raise ValueError(f"criterion must be 'aic' or 'bic', got {criterion!r}")
    orders = order_grid(**grid) if isinstance(grid, Mapping) else list(grid)
    if not orders:
        raise SarimaxError("empty order grid")
    start = max(o.lost + o.burn for o in orders)

    def attempt(order):
        try:
            return fit(series, frame, order, opt, start=start)
        except (SeriesError, np.linalg.LinAlgError, SarimaxError) as exc:
            logger.warning("SARIMAX%s failed: %s", order, exc)
            return exc

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(attempt, orders))
    else:
        results = [attempt(o) for o in orders]
    fits = [r for r in results if isinstance(r, SarimaxFit)]
    if not fits:
        raise SarimaxError("every order in the grid failed to fit")
    fits.sort(key=lambda f: _tie_key(f, criterion))
    board = tuple(
        {"order": str(f.order), "aic": f.aic, "bic": f.bic, "loglik": f.loglik, "k": f.k,
         "converged": f.converged} for f in fits)
    board += tuple({"order": str(o), "error": str(r)}
                   for o, r in zip(orders, results) if not isinstance(r, SarimaxFit))
    return replace(fits[0], leaderboard=board)


def residuals(fit_: SarimaxFit) -> TimeSeries:
    """In-sample one-step residuals y_t - L_t, date-aligned."""
    return fit_.residuals


def forecast_dynamic(fit_: SarimaxFit, horizon: int,
                     future: FeatureFrame | None = None) -> TimeSeries:
    """Multi-step forecast continuing from the end of the training series.

    Unobserved lags are replaced by earlier forecasts and future innovations
    by zero; the differenced forecasts are integrated back to levels.
    """
    if horizon < 1:
        raise ValueError("horizon must be positive")
    order, params = fit_.order, fit_.params
    series = fit_.series
    k = len(fit_.exog_names)
    if k:
        if future is None:
            raise SeriesError("model has exogenous regressors; a future frame is required")
        future = future.select(fit_.exog_names)
    if future is not None:
        future.require_follows(series.end, horizon)
    design = _Design(series, fit_.frame, order)
    e_hist = _innovations(design, params)
    z_hist = design.w - params.mu - design.X @ params.gamma
    ar, ma = _polys(params, order.S)

    if k:
        X_lvl = np.vstack([fit_.frame.select(fit_.exog_names).matrix()[-order.lost:]
                           if order.lost else np.zeros((0, k)), future.matrix()])
        X_fut = difference_values(X_lvl, order.d, order.D, order.S)
    else:
        X_fut = np.zeros((horizon, 0))

    m = z_hist.size
    z = np.concatenate([z_hist, np.zeros(horizon)])
    e = np.concatenate([e_hist, np.zeros(horizon)])
    for t in range(m, m + horizon):
        acc = 0.0
        for j in range(1, ar.size):
            if ar[j] != 0.0 and t - j >= 0:
                acc -= ar[j] * z[t - j]
        for j in range(1, ma.size):
            if ma[j] != 0.0 and t - j >= 0:
                acc += ma[j] * e[t - j]
        z[t] = acc
    w_fut = z[m:] + params.mu + X_fut @ params.gamma
    seed = series.values[len(series) - order.lost:] if order.lost else np.zeros(0)
    levels = integrate_values(w_fut, seed, order.d, order.D, order.S)[order.lost:]
    dates = np.arange(series.end + 1, series.end + 1 + horizon, dtype=np.int64)
    return TimeSeries(dates, levels)


def to_envelope_dict(fit_: SarimaxFit) -> dict:
    from .io import series_to_dict, frame_to_dict
    return {
        "order": list(fit_.order.as_tuple()),
        "params": fit_.params.to_dict(),
        "exog_names": list(fit_.exog_names),
        "loglik": fit_.loglik,
        "aic": fit_.aic,
        "bic": fit_.bic,
        "converged": fit_.converged,
        "first": int(fit_.residuals.start - fit_.series.start),
        "series": series_to_dict(fit_.series),
        "frame": frame_to_dict(fit_.frame) if fit_.frame is not None else None,
    }


def from_envelope_dict(d: Mapping) -> SarimaxFit:
    from .io import series_from_dict, frame_from_dict
    series = series_from_dict(d["series"])
    frame = frame_from_dict(d["frame"]) if d.get("frame") else None
    result = evaluate_params(series, frame, SarimaxOrder(*d["order"]),
                             SarimaxParams.from_dict(d["params"]),
                             converged=d.get("converged", True), start=d.get("first", 0))
    return result
