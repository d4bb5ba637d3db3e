"""scikit-learn compatible wrapper around the two-level trainer."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, validate_data

from .core import activations, predict
from .data import Dataset
from .evolution import GaConfig, ParamBounds
from .gradient import GradientConfig
from .hierarchy import RunConfig, run


def _as_column(X: np.ndarray) -> np.ndarray:
    if X.shape[1] != 1:
        raise ValueError(
            f"BetaNetworkRegressor takes a single input feature, got X with {X.shape[1]} columns"
        )
    return X[:, 0]


class BetaNetworkRegressor(TransformerMixin, RegressorMixin, BaseEstimator):
    """Beta basis function network for one input and one output.

    ``fit`` evolves the hidden layer with a variable-length genetic algorithm
    and then refines it by online gradient descent. ``transform`` returns the
    hidden-layer activations, so the fitted network can also be used as a
    feature map inside a pipeline.

    Parameters mirror :class:`~bbfnn.evolution.GaConfig`,
    :class:`~bbfnn.gradient.GradientConfig` and :class:`~bbfnn.hierarchy.RunConfig`.
    ``random_state`` must be a non-negative int (it seeds every random stream).

    Attributes
    ----------
    network_ : BetaNetwork
    report_ : RunReport
    n_units_ : int
    """

    def __init__(self, n_min=5, n_max=20, population_size=50, generations=100,
                 p_crossover=0.8, p_mutation=0.02, p_addition=0.1, p_elimination=0.1,
                 crossover_retry_limit=10, center_range=(-1.0, 1.0), width_range=(1e-3, 1.0),
                 p_range=(1e-3, 4.0), q_range=(1e-3, 4.0), learning_rate=5e-4,
                 max_iterations=20000, ridge=1e-10, stop_error=0.01, random_state=0):
        self.n_min = n_min
        self.n_max = n_max
        self.population_size = population_size
        self.generations = generations
        self.p_crossover = p_crossover
        self.p_mutation = p_mutation
        self.p_addition = p_addition
        self.p_elimination = p_elimination
        self.crossover_retry_limit = crossover_retry_limit
        self.center_range = center_range
        self.width_range = width_range
        self.p_range = p_range
        self.q_range = q_range
        self.learning_rate = learning_rate
        self.max_iterations = max_iterations
        self.ridge = ridge
        self.stop_error = stop_error
        self.random_state = random_state

    def _run_config(self) -> RunConfig:
        bounds = ParamBounds(self.center_range, self.width_range, self.p_range, self.q_range)
        seed = 0 if self.random_state is None else self.random_state
        ga = GaConfig(
            population_size=self.population_size, generations=self.generations,
            n_min=self.n_min, n_max=self.n_max, p_crossover=self.p_crossover,
            p_mutation=self.p_mutation, p_addition=self.p_addition,
            p_elimination=self.p_elimination, crossover_retry_limit=self.crossover_retry_limit,
            bounds=bounds, seed=seed,
        )
        grad = GradientConfig(learning_rate=self.learning_rate,
                              max_iterations=self.max_iterations, bounds=bounds)
        return RunConfig(ga=ga, grad=grad, ridge=self.ridge, stop_error=self.stop_error)

    def fit(self, X, y, X_test=None, y_test=None):
        """Train on ``(X, y)``; an optional held-out pair fills ``report_.generalization_error``."""
        X, y = validate_data(self, X, y, y_numeric=True)
        train = Dataset(_as_column(X), y, label="fit")
        test = None
        if X_test is not None:
            Xt = check_array(X_test)
            test = Dataset(_as_column(Xt), np.asarray(y_test, dtype=float), label="holdout")
        self.report_ = run(self._run_config(), train, test)
        self.network_ = self.report_.final_network
        self.n_units_ = self.report_.n_units
        return self

    def predict(self, X):
        check_is_fitted(self, "network_")
        X = validate_data(self, X, reset=False)
        return predict(self.network_, _as_column(X))

    def transform(self, X):
        """Hidden-layer activations, shape ``(n_samples, n_units_)``."""
        check_is_fitted(self, "network_")
        X = validate_data(self, X, reset=False)
        return activations(self.network_.param_array(), _as_column(X))

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.target_tags.single_output = True
        return tags
