import numpy as np
import pytest

from oracles import css_loop, simulate_sarma
from peakload import sarimax
from peakload.features import FeatureFrame
from peakload.sarimax import (ConvergenceError, OptConfig, SarimaxError, SarimaxOrder,
                              SarimaxParams, coeffs_to_pacf, css_objective, evaluate_params,
                              forecast_dynamic, lag_polynomial, pacf_to_coeffs,
                              polynomial_root_moduli, select_order)
from peakload.series import SeriesError, TimeSeries


def _series(values, start="2010-01-01"):
    return TimeSeries.from_values(values, start=start)


def test_order_parse_and_str():
    o = SarimaxOrder.parse("4,1,1,2,0,0,7")
    assert o.as_tuple() == (4, 1, 1, 2, 0, 0, 7)
    assert str(o) == "(4,1,1)(2,0,0)[7]"
    assert SarimaxOrder.parse("1,0,0,0,0,0").S == 7
    assert o.lost == 1 and o.ar_degree == 18 and o.burn == 18
    with pytest.raises(ValueError):
        SarimaxOrder.parse("1,2")
    with pytest.raises(ValueError):
        SarimaxOrder(p=-1)


def test_lag_polynomial_product():
    poly = lag_polynomial([0.5], [0.4], 3)
    np.testing.assert_allclose(poly, [1.0, -0.5, 0.0, -0.4, 0.2])


def test_pacf_transform_round_trip_and_stationary():
    rng = np.random.default_rng(0)
    for k in range(1, 6):
        for _ in range(20):
            u = rng.normal(scale=1.5, size=k)
            a = pacf_to_coeffs(u)
            assert np.all(polynomial_root_moduli(a) > 1.0)
            np.testing.assert_allclose(coeffs_to_pacf(a), u, atol=1e-7)


def test_root_moduli_ar1():
    np.testing.assert_allclose(polynomial_root_moduli([0.5]), [2.0])


def test_css_mean_only_is_sum_of_squares():
    y = np.array([3.0, 1.0, 4.0, 1.0, 5.0, 9.0])
    order = SarimaxOrder()
    params = SarimaxParams.make(mu=y.mean())
    assert css_objective(order, params, _series(y)) == pytest.approx(np.sum((y - y.mean()) ** 2),
                                                                     abs=1e-12)


def test_css_ar1_hand_series():
    y = np.array([1.0, 2.0, 0.5, -1.0, 3.0])
    phi = 0.4
    hand = sum((y[t] - phi * y[t - 1]) ** 2 for t in range(1, 5))
    value = css_objective(SarimaxOrder(p=1), SarimaxParams.make(phi=[phi]), _series(y))
    assert value == pytest.approx(hand, abs=1e-12)


def test_css_perfect_regressor_is_zero():
    rng = np.random.default_rng(1)
    y = rng.normal(size=50)
    s = _series(y)
    frame = FeatureFrame(s.dates, {"x": y})
    value = css_objective(SarimaxOrder(p=1, q=1), SarimaxParams.make([0.3], [0.2], gamma=[1.0]),
                          s, frame)
    assert value == pytest.approx(0.0, abs=1e-20)


def test_css_matches_loop_oracle_on_random_models():
    rng = np.random.default_rng(7)
    for _ in range(15):
        p, q, P, Q = rng.integers(0, 3, size=4)
        y = rng.normal(size=80).cumsum() * 0.1 + rng.normal(size=80)
        X = rng.normal(size=(80, 2))
        args = dict(phi=rng.uniform(-0.4, 0.4, p), theta=rng.uniform(-0.4, 0.4, q),
                    Phi=rng.uniform(-0.4, 0.4, P), Theta=rng.uniform(-0.4, 0.4, Q))
        mu, gamma = rng.normal(), rng.normal(size=2)
        s = _series(y)
        frame = FeatureFrame(s.dates, {"a": X[:, 0], "b": X[:, 1]})
        ours = css_objective(SarimaxOrder(p, 0, q, P, 0, Q, 7),
                             SarimaxParams.make(mu=mu, gamma=gamma, **args), s, frame)
        ref = css_loop(y, S=7, mu=mu, X=X.tolist(), gamma=gamma.tolist(), **args)
        assert ours == pytest.approx(ref, rel=1e-10)


def test_fit_recovers_ar1():
    y = simulate_sarma(2000, phi=[0.6], seed=42)
    fit = sarimax.fit(_series(y), None, SarimaxOrder(p=1))
    assert 0.55 <= fit.params.phi[0] <= 0.65
    assert fit.converged
    assert fit.params.sigma2 == pytest.approx(1.0, abs=0.1)


def test_fit_recovers_seasonal_ar():
    y = simulate_sarma(2000, Phi=[0.5], S=7, seed=42)
    fit = sarimax.fit(_series(y), None, SarimaxOrder(P=1, S=7))
    assert 0.42 <= fit.params.Phi[0] <= 0.58


def test_fit_white_noise_ar_near_zero():
    y = np.random.default_rng(42).normal(size=500)
    fit = sarimax.fit(_series(y), None, SarimaxOrder(p=1))
    assert -0.1 <= fit.params.phi[0] <= 0.1


def test_fit_recovers_mean_and_exog_weights():
    rng = np.random.default_rng(3)
    x = rng.normal(size=1500)
    y = 10.0 + 2.5 * x + simulate_sarma(1500, phi=[0.5], seed=3)
    s = _series(y)
    fit = sarimax.fit(s, FeatureFrame(s.dates, {"x": x}), SarimaxOrder(p=1))
    assert fit.params.mu == pytest.approx(10.0, abs=0.2)
    assert fit.params.gamma[0] == pytest.approx(2.5, abs=0.05)
    assert fit.exog_names == ("x",)


def test_fit_is_deterministic():
    y = simulate_sarma(400, phi=[0.3], theta=[0.2], seed=9)
    a = sarimax.fit(_series(y), None, SarimaxOrder(p=1, q=1))
    b = sarimax.fit(_series(y), None, SarimaxOrder(p=1, q=1))
    assert a.params.to_dict() == b.params.to_dict()


def test_fit_too_short_raises():
    with pytest.raises(SeriesError, match="too short"):
        sarimax.fit(_series([1.0, 2.0, 3.0]), None, SarimaxOrder(p=2, d=1))


def test_strict_convergence_reports_best():
    y = simulate_sarma(300, phi=[0.5], theta=[0.3], seed=1)
    with pytest.raises(ConvergenceError) as info:
        sarimax.fit(_series(y), None, SarimaxOrder(p=1, q=1),
                    OptConfig(restarts=0, max_evals=3), strict=True)
    assert info.value.best is not None


def test_select_order_singleton_and_leaderboard():
    y = simulate_sarma(300, phi=[0.5], seed=2)
    fit = select_order(_series(y), None, [SarimaxOrder(p=1)])
    assert fit.order == SarimaxOrder(p=1)
    fit = select_order(_series(y), None, {"p": (0, 1, 2), "q": (0, 1)})
    assert len(fit.leaderboard) == 6
    aics = [row["aic"] for row in fit.leaderboard]
    assert aics == sorted(aics) and fit.aic == aics[0]


def test_select_order_rejects_bad_criterion_and_empty_grid():
    s = _series(np.arange(30.0))
    with pytest.raises(ValueError):
        select_order(s, None, [SarimaxOrder()], criterion="hqic")
    with pytest.raises(SarimaxError):
        select_order(s, None, [])


def test_select_order_common_sample():
    y = simulate_sarma(300, phi=[0.5], seed=4)
    fit = select_order(_series(y), None, {"p": (0, 3)})
    # Every candidate is scored after the largest burn-in in the grid.
    assert fit.n_eff == 297


def test_forecast_ar1_geometric_decay():
    y = np.array([4.0, -2.0, 7.0, 10.0])
    fit = evaluate_params(_series(y), None, SarimaxOrder(p=1), SarimaxParams.make(phi=[0.5]))
    fc = forecast_dynamic(fit, 3)
    np.testing.assert_allclose(fc.values, [5.0, 2.5, 1.25], atol=1e-12)
    assert fc.start == fit.series.end + 1


def test_forecast_flat_series_fixed_point():
    s = _series(np.full(20, 7.0))
    fit = evaluate_params(s, None, SarimaxOrder(p=1, d=1), SarimaxParams.make(phi=[0.3]))
    np.testing.assert_allclose(forecast_dynamic(fit, 5).values, 7.0, atol=1e-12)


def test_forecast_random_walk_with_drift_and_exog():
    rng = np.random.default_rng(6)
    x = rng.normal(size=40)
    y = np.cumsum(rng.normal(size=40))
    s = _series(y)
    frame = FeatureFrame(s.dates, {"x": x})
    fit = evaluate_params(s, frame, SarimaxOrder(d=1), SarimaxParams.make(mu=0.5, gamma=[2.0]))
    xf = rng.normal(size=3)
    future = FeatureFrame(np.arange(s.end + 1, s.end + 4), {"x": xf})
    fc = forecast_dynamic(fit, 3, future).values
    # Level recursion: y_t = y_{t-1} + mu + gamma * (x_t - x_{t-1}).
    xs = np.concatenate([[x[-1]], xf])
    expected, level = [], y[-1]
    for t in range(1, 4):
        level = level + 0.5 + 2.0 * (xs[t] - xs[t - 1])
        expected.append(level)
    np.testing.assert_allclose(fc, expected, atol=1e-12)


def test_forecast_frame_checks():
    s = _series(np.random.default_rng(0).normal(size=30))
    frame = FeatureFrame(s.dates, {"x": np.arange(30.0)})
    fit = evaluate_params(s, frame, SarimaxOrder(p=1), SarimaxParams.make([0.2], gamma=[0.1]))
    with pytest.raises(SeriesError):
        forecast_dynamic(fit, 2)
    bad = FeatureFrame(np.arange(s.end + 2, s.end + 4), {"x": [1.0, 2.0]})
    with pytest.raises(SeriesError, match="starts"):
        forecast_dynamic(fit, 2, bad)
    with pytest.raises(ValueError):
        forecast_dynamic(fit, 0)


def test_residuals_mean_only_and_perfect_fit():
    y = np.array([1.0, 4.0, 2.0, 5.0])
    fit = evaluate_params(_series(y), None, SarimaxOrder(), SarimaxParams.make(mu=y.mean()))
    np.testing.assert_allclose(sarimax.residuals(fit).values, y - y.mean())
    np.testing.assert_array_equal(sarimax.residuals(fit).dates, fit.series.dates)
    s = _series(y)
    fit = evaluate_params(s, FeatureFrame(s.dates, {"x": y}), SarimaxOrder(),
                          SarimaxParams.make(gamma=[1.0]))
    np.testing.assert_array_equal(sarimax.residuals(fit).values, 0.0)


def test_residual_dates_skip_burn_in():
    y = simulate_sarma(100, phi=[0.4], seed=0)
    fit = sarimax.fit(_series(y), None, SarimaxOrder(p=2, d=1))
    r = sarimax.residuals(fit)
    assert r.start == fit.series.start + 3
    np.testing.assert_allclose(r.values + fit.fitted.values, y[3:], atol=1e-12)


def test_aic_bic_definitions():
    y = simulate_sarma(500, phi=[0.5], seed=5)
    fit = sarimax.fit(_series(y), None, SarimaxOrder(p=1))
    n = fit.n_eff
    loglik = -0.5 * n * (np.log(2 * np.pi * fit.params.sigma2) + 1.0)
    assert fit.loglik == pytest.approx(loglik, rel=1e-12)
    assert fit.k == 3
    assert fit.aic == pytest.approx(6 - 2 * loglik, rel=1e-12)
    assert fit.bic == pytest.approx(3 * np.log(n) - 2 * loglik, rel=1e-12)


def test_envelope_round_trip():
    rng = np.random.default_rng(8)
    y = simulate_sarma(200, phi=[0.5], Phi=[0.3], seed=8) + 50.0
    s = _series(y)
    frame = FeatureFrame(s.dates, {"x": rng.normal(size=200)})
    fit = select_order(s, frame, {"p": (0, 1), "P": (0, 1)})
    back = sarimax.from_envelope_dict(sarimax.to_envelope_dict(fit))
    assert back.order == fit.order
    assert back.aic == fit.aic
    np.testing.assert_array_equal(back.residuals.values, fit.residuals.values)
    future = FeatureFrame(np.arange(s.end + 1, s.end + 11), {"x": rng.normal(size=10)})
    np.testing.assert_array_equal(forecast_dynamic(back, 10, future).values,
                                  forecast_dynamic(fit, 10, future).values)


def test_diagnostics_shape():
    y = simulate_sarma(200, phi=[0.5], seed=0)
    d = sarimax.fit(_series(y), None, SarimaxOrder(p=1)).diagnostics(10)
    assert len(d["acf"]) == 11 and d["acf"][0] == pytest.approx(1.0)
    assert len(d["pacf"]) == 11
