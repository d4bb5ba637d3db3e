"""Beta basis function networks trained by a genetic algorithm plus gradient descent."""

from .core import (
    ABFactors,
    BetaNetwork,
    BetaUnit,
    DomainError,
    InvalidParameter,
    ab_factors,
    beta_eval,
    forward,
    predict,
    solve_weights,
    support,
    training_error,
)
from .data import Dataset, Sample, g2_eval, g2_experiment, load_csv, sample_uniform
from .estimator import BetaNetworkRegressor
from .evolution import Chromosome, GaConfig, ParamBounds
from .gradient import GradientConfig, gradient_check, refine
from .hierarchy import RunConfig, RunReport, compare_runs, run

__version__ = "0.1.0"
