import numpy as np
import pytest

from oracles import grid_dual_4, svr_dual
from peakload.svr import (Kernel, SvrConfig, SvrModel, dual_objective, fit_svr, kernel_eval,
                          kkt_verify, predict)

LINEAR = Kernel("linear")


def four_point_problem():
    """A 4-point dual whose optimum sits on the 1e-3 lattice.

    Targets are built from chosen interior coefficients so that the
    optimality conditions hold exactly: y_i = f(x_i) + eps * sign(beta_i).
    """
    X = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.5]])
    beta = np.array([0.5, -0.25, -0.75, 0.5])
    K = X @ X.T
    y = K @ beta + 0.3 + 0.1 * np.sign(beta)
    return X, y, beta, K


def test_kernel_examples():
    rng = np.random.default_rng(0)
    x = rng.normal(size=3)
    for gamma in (0.01, 1.0, 50.0):
        assert kernel_eval(Kernel("rbf", gamma), x, x) == 1.0
    assert kernel_eval(LINEAR, [1, 2], [3, 4]) == 11.0
    assert kernel_eval(Kernel("poly", gamma=1.0, degree=2, coef0=1.0), [1, 2], [3, 4]) == 144.0
    assert kernel_eval(Kernel("sigmoid", gamma=0.5, coef0=0.0), [1, 0], [2, 0]) == \
        pytest.approx(np.tanh(1.0))
    with pytest.raises(ValueError, match="dimension"):
        kernel_eval(LINEAR, [1, 2], [1, 2, 3])


def test_kernels_symmetric_and_matrix_consistent():
    rng = np.random.default_rng(1)
    kernels = [LINEAR, Kernel("rbf", 0.3), Kernel.parse("poly:3:1:0.5"),
               Kernel.parse("sigmoid:0.2:0.1")]
    for _ in range(100):
        x, z = rng.normal(size=(2, 4))
        for k in kernels:
            assert kernel_eval(k, x, z) == kernel_eval(k, z, x)
    A, B = rng.normal(size=(5, 4)), rng.normal(size=(3, 4))
    for k in kernels:
        M = k.matrix(A, B)
        ref = [[kernel_eval(k, a, b) for b in B] for a in A]
        np.testing.assert_allclose(M, ref, rtol=1e-12, atol=1e-12)


def test_kernel_parse_round_trip_and_validation():
    for text in ("linear", "rbf:0.5", "poly:2:1:1", "sigmoid:0.01:0"):
        assert str(Kernel.parse(text)) == text
    with pytest.raises(ValueError):
        Kernel.parse("cubic")
    with pytest.raises(ValueError):
        Kernel("rbf", gamma=0.0)
    with pytest.raises(ValueError):
        SvrConfig(C=0.0)
    with pytest.raises(ValueError):
        SvrConfig(epsilon=-0.1)


def test_tube_fit_on_line():
    x = np.arange(10.0)[:, None]
    y = 2.0 * x[:, 0]
    model = fit_svr(SvrConfig(C=1000.0, epsilon=0.1, kernel=LINEAR, tol=1e-6), x, y)
    assert np.max(np.abs(model.decision(x) - y)) <= 0.1 + 1e-6


def test_constant_targets():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(12, 3))
    model = fit_svr(SvrConfig(kernel=Kernel("rbf", 0.5)), X, np.full(12, 4.2))
    assert model.coef.size == 0
    np.testing.assert_allclose(model.decision(rng.normal(size=(5, 3))), 4.2, atol=1e-12)


def test_four_point_dual_against_grid_oracle():
    X, y, beta, K = four_point_problem()
    config = SvrConfig(C=1.0, epsilon=0.1, kernel=LINEAR, tol=1e-9)
    model = fit_svr(config, X, y)
    _, grid_best = grid_dual_4(K, y, 0.1, 1.0)
    assert abs(model.dual_objective - grid_best) < 1e-6
    assert grid_best == pytest.approx(svr_dual(beta, K, y, 0.1), abs=1e-12)


def test_random_four_point_duals_never_below_grid():
    rng = np.random.default_rng(3)
    for _ in range(5):
        X, y = rng.normal(size=(4, 2)), rng.normal(size=4)
        config = SvrConfig(C=1.0, epsilon=0.05, kernel=Kernel("rbf", 0.7), tol=1e-9)
        model = fit_svr(config, X, y)
        _, grid_best = grid_dual_4(config.kernel.matrix(X, X), y, 0.05, 1.0)
        assert model.dual_objective >= grid_best - 1e-9


def test_dual_objective_matches_loop():
    rng = np.random.default_rng(4)
    K = rng.normal(size=(5, 5))
    K = K @ K.T
    beta, y = rng.normal(size=5), rng.normal(size=5)
    assert dual_objective(beta, K, y, 0.2) == pytest.approx(svr_dual(beta, K.tolist(), y, 0.2),
                                                            rel=1e-12)


def test_model_invariants_and_kkt():
    for seed in range(20):
        r = np.random.default_rng(seed)
        X = r.normal(size=(15, 2))
        y = np.sin(X[:, 0]) + 0.1 * r.normal(size=15)
        config = SvrConfig(C=2.0, epsilon=0.05, kernel=Kernel("rbf", 0.5), tol=1e-6)
        model = fit_svr(config, X, y)
        assert abs(model.coef.sum()) <= 1e-6 * config.C
        assert np.all(np.abs(model.coef) <= config.C + 1e-9)
        report = kkt_verify(model, config, X, y)
        assert report.violations == 0 and model.report.violations == 0


def test_kkt_detects_corrupted_coefficient():
    X, y, _, _ = four_point_problem()
    config = SvrConfig(C=1.0, epsilon=0.1, kernel=LINEAR, tol=1e-9)
    model = fit_svr(config, X, y)
    coef = model.coef.copy()
    coef[1] += 0.3  # the first support vector is the origin, so skip it
    bad = SvrModel(model.support, coef, model.b, model.kernel)
    assert kkt_verify(bad, config, X, y, tol=1e-6).violations >= 1


def test_zero_epsilon_is_well_defined():
    rng = np.random.default_rng(6)
    X, y = rng.normal(size=(10, 2)), rng.normal(size=10)
    config = SvrConfig(C=1.0, epsilon=0.0, kernel=Kernel("rbf", 1.0), tol=1e-6)
    model = fit_svr(config, X, y)
    report = kkt_verify(model, config, X, y)
    assert np.isfinite(report.max_violation) and report.violations == 0


def test_zero_coefficients_predict_bias():
    model = SvrModel(np.zeros((0, 3)), np.zeros(0), 1.5, LINEAR)
    np.testing.assert_array_equal(model.decision(np.ones((4, 3))), 1.5)


def test_linear_kernel_matches_primal_reconstruction():
    rng = np.random.default_rng(7)
    X = rng.normal(size=(30, 4))
    y = X @ np.array([1.0, -2.0, 0.5, 0.0]) + 0.2 * rng.normal(size=30)
    model = fit_svr(SvrConfig(C=1.0, epsilon=0.1, kernel=LINEAR), X, y)
    w = model.coef @ model.support
    Z = rng.normal(size=(50, 4))
    assert np.max(np.abs(model.decision(Z) - (Z @ w + model.b))) < 1e-10


def test_prediction_invariant_to_support_order():
    rng = np.random.default_rng(8)
    X, y = rng.normal(size=(20, 3)), rng.normal(size=20)
    model = fit_svr(SvrConfig(kernel=Kernel("rbf", 0.3)), X, y)
    perm = rng.permutation(model.coef.size)
    shuffled = SvrModel(model.support[perm], model.coef[perm], model.b, model.kernel)
    Z = rng.normal(size=(10, 3))
    np.testing.assert_allclose(shuffled.decision(Z), model.decision(Z), rtol=0, atol=1e-12)
    assert predict(model, Z[0]) == pytest.approx(model.decision(Z[:1])[0])


def test_duplicated_point_predictions_unchanged():
    rng = np.random.default_rng(9)
    X = rng.normal(size=(12, 2))
    y = X[:, 0] - X[:, 1] + 0.3 * rng.normal(size=12)
    config = SvrConfig(C=1.0, epsilon=0.1, kernel=LINEAR, tol=1e-10, max_passes=5000)
    a = fit_svr(config, X, y)
    b = fit_svr(config, np.vstack([X, X[3]]), np.append(y, y[3]))
    Z = rng.normal(size=(20, 2))
    np.testing.assert_allclose(a.decision(Z), b.decision(Z), atol=1e-8)


def test_model_round_trip():
    rng = np.random.default_rng(10)
    X, y = rng.normal(size=(10, 2)), rng.normal(size=10)
    model = fit_svr(SvrConfig(kernel=Kernel.parse("poly:2:1:1")), X, y)
    back = SvrModel.from_dict(model.to_dict())
    np.testing.assert_array_equal(back.decision(X), model.decision(X))
    with pytest.raises(ValueError, match="features"):
        model.decision(np.zeros((1, 3)))
