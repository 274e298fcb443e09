import numpy as np
import pytest

from conftest import FAST
from peakload import hybrid, sarimax
from peakload.hybrid import (HybridModel, ZeroResidual, fit_hybrid, fitted_hybrid,
                             forecast_components, forecast_hybrid)
from peakload.series import SeriesError, TimeSeries

ORDER = "1,0,0,1,0,0,7"


@pytest.fixture(scope="module")
def linear(small_data):
    (train, frame), _ = small_data
    return sarimax.fit(train, frame, sarimax.SarimaxOrder.parse(ORDER))


class OracleResidual:
    """Returns the true in-sample residuals it was trained on."""

    kind = "oracle"

    def fit(self, series, frame=None):
        self.truth = series
        return self

    def predict_in_sample(self, series, frame=None):
        return self.truth


def test_zero_residual_forecast_is_bitwise_sarimax(small_data, linear):
    (train, frame), (test, tframe) = small_data
    model = fit_hybrid(train, frame, linear, "zero")
    lin = sarimax.forecast_dynamic(linear, len(test), tframe)
    hyb = forecast_hybrid(model, len(test), tframe)
    assert hyb.values.tobytes() == lin.values.tobytes()
    np.testing.assert_array_equal(hyb.dates, lin.dates)


def test_zero_residual_from_order_matches_direct_fit(small_data, linear):
    (train, frame), (test, tframe) = small_data
    model = fit_hybrid(train, frame, ORDER, "zero")
    assert model.linear.params.to_dict() == linear.params.to_dict()


def test_oracle_residual_recovers_actuals(small_data, linear):
    (train, frame), _ = small_data
    model = fit_hybrid(train, frame, linear, OracleResidual())
    fitted = fitted_hybrid(model)
    actual = train.slice_dates(fitted.start, fitted.end).values
    assert np.all(np.abs(fitted.values - actual) <= np.spacing(np.abs(actual)))


@pytest.mark.parametrize("kind", ["mlp", "svr", "lstm"])
def test_additivity_is_exact(small_data, linear, kind):
    (train, frame), (test, tframe) = small_data
    model = fit_hybrid(train, frame, linear, kind, FAST[kind])
    parts = forecast_components(model, len(test), tframe)
    np.testing.assert_array_equal(parts.total.values, parts.linear.values + parts.residual.values)
    np.testing.assert_array_equal(parts.residual.values,
                                  model.residual.forecast(len(test), tframe).values)


def test_residual_model_trained_on_residuals(small_data, linear):
    (train, frame), _ = small_data
    model = fit_hybrid(train, frame, linear, "mlp", FAST["mlp"])
    r = sarimax.residuals(linear)
    assert model.residual.last_day == r.end == train.end
    in_sample = model.residual.predict_in_sample(r, frame.slice_dates(r.start, r.end))
    assert in_sample.start == r.start + model.residual.lookback


def test_leakage_test_data_does_not_change_fit(small_data):
    (train, frame), (test, tframe) = small_data
    a = fit_hybrid(train, frame, ORDER, "mlp", FAST["mlp"])
    # Rebuild an identical training set from perturbed "full" data.
    full = TimeSeries(np.concatenate([train.dates, test.dates]),
                      np.concatenate([train.values, test.values * 1.5 + 1000.0]))
    t2 = full.slice_dates(train.start, train.end)
    b = fit_hybrid(t2, frame, ORDER, "mlp", FAST["mlp"])
    assert a.to_dict() == b.to_dict()
    fa = forecast_hybrid(a, len(test), tframe)
    fb = forecast_hybrid(b, len(test), tframe)
    assert fa.values.tobytes() == fb.values.tobytes()


def test_prefix_stability(small_data, linear):
    (train, frame), (test, tframe) = small_data
    model = fit_hybrid(train, frame, linear, "svr", FAST["svr"])
    long = forecast_hybrid(model, 20, tframe.take(slice(0, 20))).values
    short = forecast_hybrid(model, 10, tframe.take(slice(0, 10))).values
    np.testing.assert_array_equal(long[:10], short)


def test_frame_mismatch_errors(small_data, linear):
    (train, frame), (test, tframe) = small_data
    model = fit_hybrid(train, frame, linear, "zero")
    with pytest.raises(SeriesError):
        forecast_hybrid(model, 5, tframe.take(slice(1, 6)))


def test_foreign_linear_fit_rejected(small_data, linear):
    (train, frame), _ = small_data
    shorter = train.slice_dates(train.start + 1, train.end)
    with pytest.raises(SeriesError, match="different date range"):
        fit_hybrid(shorter, frame.slice_dates(shorter.start, shorter.end), linear, "zero")


def test_unknown_residual_kind(small_data, linear):
    (train, frame), _ = small_data
    with pytest.raises(ValueError, match="unknown residual"):
        fit_hybrid(train, frame, linear, "xgboost")


def test_residual_defaults_are_overridable():
    lstm = hybrid.make_residual("lstm")
    assert lstm.config.hidden_size == 8 and lstm.config.epochs == 30
    assert hybrid.make_residual("lstm", {"epochs": 5}).config.epochs == 5
    assert isinstance(hybrid.make_residual("zero"), ZeroResidual)


@pytest.mark.parametrize("kind", ["zero", "mlp"])
def test_round_trip(small_data, linear, kind):
    (train, frame), (test, tframe) = small_data
    model = fit_hybrid(train, frame, linear, kind, FAST.get(kind))
    back = HybridModel.from_dict(model.to_dict())
    assert back.residual_kind == kind
    np.testing.assert_array_equal(forecast_hybrid(back, 15, tframe.take(slice(0, 15))).values,
                                  forecast_hybrid(model, 15, tframe.take(slice(0, 15))).values)
