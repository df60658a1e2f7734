import itertools
import json

import numpy as np
import pytest
from scipy.optimize import minimize

from ftmbench.svm import (
    LinearModel,
    PairModel,
    TrainConfig,
    class_weights,
    decision_matrix,
    predict,
    primal_objective,
    train,
    train_binary,
)


def blobs(rng, n=20, d=2, gap=4.0):
    X = np.vstack([rng.normal(-gap / 2, 0.4, (n, d)), rng.normal(gap / 2, 0.4, (n, d))])
    y = np.r_[-np.ones(n), np.ones(n)]
    return X, y


def noisy(rng, n=60, d=3):
    X = rng.normal(size=(n, d))
    y = np.where(X[:, 0] + 0.8 * rng.normal(size=n) > 0, 1.0, -1.0)
    return X, y


def test_class_weights():
    labels = ["A"] * 10 + ["B"] * 5
    assert class_weights(labels, True) == {"A": 0.75, "B": 1.5}
    assert class_weights(labels, False) == {"A": 1.0, "B": 1.0}
    assert class_weights(["A"] * 7 + ["B"] * 7, True) == {"A": 1.0, "B": 1.0}


def test_two_point_analytic():
    m = train_binary(np.array([[-1.0], [1.0]]), np.array([-1.0, 1.0]), TrainConfig(C=1.0))
    # optimum: w = 1, b = 0, alpha = (1/2, 1/2)
    assert m.weights[0] == pytest.approx(1.0, abs=1e-9)
    assert abs(-m.bias / m.weights[0]) <= 1e-6
    assert m.decision(np.array([[0.5]]))[0] > 0
    np.testing.assert_allclose(m.dual_coeffs, [0.5, 0.5], atol=1e-9)


def test_duplicated_rows_halved_C(rng):
    X, y = noisy(rng, 40)
    tight = dict(tol=1e-10, max_epochs=100000)
    a = train_binary(X, y, TrainConfig(C=1.0, **tight))
    b = train_binary(np.vstack([X, X]), np.r_[y, y], TrainConfig(C=0.5, **tight))
    grid = np.array(list(itertools.product(np.linspace(-3, 3, 7), repeat=3)))
    np.testing.assert_allclose(a.decision(grid), b.decision(grid), atol=1e-6)


def test_separable_blobs_train_accuracy(rng):
    for seed in range(5):
        X, y = blobs(np.random.default_rng(seed))
        m = train_binary(X, y)
        assert np.all(np.sign(m.decision(X)) == y)


def _check_invariants(X, y, cfg, sample_weight=None):
    m = train_binary(X, y, cfg, sample_weight)
    cw = np.ones(len(y)) if sample_weight is None else sample_weight
    assert np.all(m.dual_coeffs >= 0)
    assert np.all(m.dual_coeffs <= cfg.C * cw + 1e-15)
    Xa = np.hstack([X, np.ones((len(y), 1))])
    w = (m.dual_coeffs * y) @ Xa
    np.testing.assert_allclose(w[:-1], m.weights, atol=1e-8, rtol=0)
    assert abs(w[-1] - m.bias) <= 1e-8
    # the dual objective never decreases
    assert np.all(np.diff(m.dual_trace) >= -1e-10)
    return m


@pytest.mark.parametrize("C", [0.1, 1.0, 10.0])
def test_dual_invariants(rng, C):
    X, y = noisy(rng)
    sw = np.where(y > 0, 1.5, 0.75)
    _check_invariants(X, y, TrainConfig(C=C))
    _check_invariants(X, y, TrainConfig(C=C), sw)


def test_matches_generic_qp_solver(rng):
    """Independent route: L-BFGS-B on the box-constrained dual."""
    X, y = noisy(rng, 30)
    Xa = np.hstack([X, np.ones((30, 1))])
    Q = (y[:, None] * Xa) @ (y[:, None] * Xa).T
    res = minimize(lambda a: 0.5 * a @ Q @ a - a.sum(), np.zeros(30),
                   jac=lambda a: Q @ a - 1.0, bounds=[(0, 1.0)] * 30, method="L-BFGS-B",
                   options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 10000})
    w_ref = (res.x * y) @ Xa
    m = train_binary(X, y, TrainConfig(C=1.0, tol=1e-8, max_epochs=100000))
    np.testing.assert_allclose(np.r_[m.weights, m.bias], w_ref, atol=1e-4)


def test_local_minimum_probe(rng):
    for X, y in (blobs(rng), noisy(rng), (np.array([[-1.0], [1.0]]), np.array([-1.0, 1.0]))):
        m = train_binary(X, y)
        base = primal_objective(X, y, m.weights, m.bias)
        theta = np.r_[m.weights, m.bias]
        for j in range(theta.size):
            for step in (1e-3, -1e-3):
                t = theta.copy()
                t[j] += step
                assert base <= primal_objective(X, y, t[:-1], t[-1]) + 1e-12


def test_determinism(rng):
    X, y = noisy(rng)
    a = train_binary(X, y, TrainConfig(seed=3))
    b = train_binary(X, y, TrainConfig(seed=3))
    assert a.weights.tobytes() == b.weights.tobytes()
    assert a.dual_coeffs.tobytes() == b.dual_coeffs.tobytes()
    assert a.bias == b.bias


def test_binary_errors():
    with pytest.raises(ValueError):
        train_binary(np.zeros((3, 1)), np.ones(3))
    with pytest.raises(ValueError):
        train_binary(np.array([[np.nan], [1.0]]), np.array([-1.0, 1.0]))


def test_multiclass_pair_counts(rng):
    for k in (2, 3, 5):
        labels = [f"c{i % k}" for i in range(10 * k)]
        X = rng.normal(size=(len(labels), 2))
        m = train(X, labels)
        assert len(m.pairs) == k * (k - 1) // 2
    with pytest.raises(ValueError):
        train(rng.normal(size=(4, 2)), ["a"] * 4)


def test_two_class_train_equals_binary(rng):
    X, yb = noisy(rng)
    labels = ["neg" if v < 0 else "pos" for v in yb]
    m = train(X, labels, classes=["neg", "pos"])
    b = train_binary(X, yb)
    assert m.pairs[0].class_pair == ("neg", "pos")
    assert m.pairs[0].weights.tobytes() == b.weights.tobytes()
    assert predict(m, np.array([[5.0, 0, 0]])) == ["pos"]


def test_separable_multiclass_predict(rng):
    centers = np.array([[0, 6], [6, 0], [-6, -6]])
    X = np.vstack([rng.normal(c, 0.5, (15, 2)) for c in centers])
    labels = [lab for lab in "xyz" for _ in range(15)]
    m = train(X, labels)
    assert predict(m, X) == labels


def _pair(a, b, w, bias):
    return PairModel((a, b), np.array([w], float), float(bias), np.empty(0), 0)


def test_cycle_tie_break_by_decision_strength():
    # x = 1: A beats B (d=-0.5), B beats C (d=-2), C beats A (d=-1): one vote each
    pairs = [_pair("A", "B", 0.0, -0.5), _pair("A", "C", 0.0, 1.0), _pair("B", "C", 0.0, -2.0)]
    model = LinearModel(["A", "B", "C"], pairs, ["f"])
    assert predict(model, np.array([[1.0]])) == ["B"]


def test_full_tie_goes_to_lowest_index():
    pairs = [_pair("A", "B", 0.0, -1.0), _pair("A", "C", 0.0, 1.0), _pair("B", "C", 0.0, -1.0)]
    model = LinearModel(["A", "B", "C"], pairs, ["f"])
    assert predict(model, np.array([[0.0]])) == ["A"]


def test_predict_column_mismatch(rng):
    m = train(rng.normal(size=(10, 2)), list("ababababab"))
    with pytest.raises(ValueError):
        decision_matrix(m, np.zeros((1, 3)))


def test_json_round_trip(rng):
    X = rng.normal(size=(30, 2))
    labels = [lab for lab in "abc" for _ in range(10)]
    m = train(X, labels, TrainConfig(balanced_weights=True))
    back = LinearModel.from_dict(json.loads(json.dumps(m.to_dict())))
    assert predict(back, X) == predict(m, X)
    assert back.config == m.config


def test_matches_liblinear(rng):
    """liblinear's hinge-loss dual with intercept_scaling=1 solves the same problem."""
    from sklearn.svm import LinearSVC

    X, y = noisy(rng, 50)
    ref = LinearSVC(loss="hinge", dual=True, C=0.5, tol=1e-10, max_iter=10**6,
                    intercept_scaling=1.0).fit(X, y)
    m = train_binary(X, y, TrainConfig(C=0.5, tol=1e-9, max_epochs=100000))
    np.testing.assert_allclose(np.r_[m.weights, m.bias], np.r_[ref.coef_[0], ref.intercept_],
                               atol=1e-5)
