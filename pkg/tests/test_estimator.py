import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.linear_model import LinearRegression
from sklearn.pipeline import make_pipeline

from bbfnn.core import InvalidParameter, training_error
from bbfnn.data import Dataset
from bbfnn.estimator import BetaNetworkRegressor

FAST = dict(population_size=10, generations=5, n_min=2, n_max=6, max_iterations=20, random_state=3)


@pytest.fixture
def xy():
    x = np.linspace(-1, 1, 41)
    return x.reshape(-1, 1), np.sin(3 * x)


def test_params_round_trip_and_clone():
    est = BetaNetworkRegressor(**FAST)
    params = est.get_params()
    assert params["n_max"] == 6 and params["random_state"] == 3
    twin = clone(est)
    assert twin.get_params() == params
    est.set_params(n_max=9)
    assert est.n_max == 9


def test_fit_predict_matches_report(xy):
    X, y = xy
    est = BetaNetworkRegressor(**FAST).fit(X, y)
    assert est.n_features_in_ == 1
    assert est.n_units_ == len(est.network_)
    pred = est.predict(X)
    assert pred.shape == (41,)
    assert 0.5 * np.sum((pred - y) ** 2) == pytest.approx(est.report_.training_error, rel=1e-12)
    assert est.report_.training_error == training_error(est.network_, Dataset(X[:, 0], y))


def test_fit_is_deterministic(xy):
    X, y = xy
    a = BetaNetworkRegressor(**FAST).fit(X, y).predict(X)
    b = BetaNetworkRegressor(**FAST).fit(X, y).predict(X)
    assert np.array_equal(a, b)


def test_holdout_sets_generalization_error(xy):
    X, y = xy
    est = BetaNetworkRegressor(**FAST).fit(X, y, X_test=X[::4], y_test=y[::4])
    assert est.report_.generalization_error is not None


def test_transform_gives_activations(xy):
    X, y = xy
    est = BetaNetworkRegressor(**FAST).fit(X, y)
    phi = est.transform(X)
    assert phi.shape == (41, est.n_units_)
    assert np.all((phi >= 0) & (phi <= 1))
    np.testing.assert_allclose(phi @ np.array(est.network_.weights), est.predict(X), rtol=1e-12, atol=1e-14)


def test_pipeline_on_activations(xy):
    X, y = xy
    pipe = make_pipeline(BetaNetworkRegressor(**FAST), LinearRegression()).fit(X, y)
    assert pipe.predict(X).shape == (41,)


def test_unfitted_and_bad_input(xy):
    X, y = xy
    with pytest.raises(NotFittedError):
        BetaNetworkRegressor().predict(X)
    with pytest.raises(ValueError, match="single input feature"):
        BetaNetworkRegressor(**FAST).fit(np.hstack([X, X]), y)
    est = BetaNetworkRegressor(**FAST).fit(X, y)
    with pytest.raises(ValueError):
        est.predict(np.hstack([X, X]))
    with pytest.raises(ValueError):
        BetaNetworkRegressor(**FAST).fit(X, np.where(y > 0, np.nan, y))


def test_invalid_hyperparameter_raised_at_fit(xy):
    X, y = xy
    with pytest.raises(InvalidParameter, match="p_crossover"):
        BetaNetworkRegressor(**{**FAST, "p_crossover": 2.0}).fit(X, y)
