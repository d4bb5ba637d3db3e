"""Beta activation, network forward pass, output-weight solving and error measures."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class DomainError(ValueError):
    """Raised when a point lies outside the region where a formula is defined."""


class InvalidParameter(ValueError):
    """A configuration field holds an unusable value; ``field`` names it."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


@dataclass(frozen=True)
class BetaUnit:
    """One hidden neuron: center, width and the two shape exponents."""

    center: float
    width: float
    shape_p: float
    shape_q: float

    def __post_init__(self):
        for name in ("center", "width", "shape_p", "shape_q"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.width <= 0:
            raise ValueError(f"width must be > 0, got {self.width!r}")
        if self.shape_p <= 0 or self.shape_q <= 0:
            raise ValueError(
                f"shape exponents must be > 0, got p={self.shape_p!r}, q={self.shape_q!r}"
            )
        # Keep the numbers as plain floats so equality and hashing are exact.
        for name in ("center", "width", "shape_p", "shape_q"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def lower(self) -> float:
        p, q = self.shape_p, self.shape_q
        return self.center - self.width * p / (p + q)

    @property
    def upper(self) -> float:
        p, q = self.shape_p, self.shape_q
        return self.center + self.width * q / (p + q)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.center, self.width, self.shape_p, self.shape_q)


@dataclass(frozen=True)
class ABFactors:
    a: float
    b: float


@dataclass(frozen=True)
class BetaNetwork:
    """Single-output network: ``f(x) = sum_i w_i * beta_i(x)``."""

    units: tuple[BetaUnit, ...] = ()
    weights: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "units", tuple(self.units))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.units) != len(self.weights):
            raise ValueError(
                f"{len(self.units)} units but {len(self.weights)} weights"
            )
        for u in self.units:
            if not isinstance(u, BetaUnit):
                raise TypeError(f"expected BetaUnit, got {type(u).__name__}")

    def __len__(self) -> int:
        return len(self.units)

    def __call__(self, x):
        return predict(self, x)

    @classmethod
    def from_arrays(cls, params: np.ndarray, weights: Sequence[float]) -> "BetaNetwork":
        """Build from an ``(k, 4)`` array of (center, width, p, q) rows."""
        params = np.asarray(params, dtype=float).reshape(-1, 4)
        units = tuple(BetaUnit(*map(float, row)) for row in params)
        return cls(units, tuple(weights))

    def param_array(self) -> np.ndarray:
        return np.array([u.as_tuple() for u in self.units], dtype=float).reshape(-1, 4)


def support(unit: BetaUnit) -> tuple[float, float]:
    """Closed interval ``[x0, x1]`` on which the unit can be nonzero."""
    return unit.lower, unit.upper


def _edge_distances(unit: BetaUnit, x: float) -> tuple[float, float]:
    """``(q*d - (p+q)(x-xc), p*d + (p+q)(x-xc))``: scaled distances to the upper
    and lower support edges."""
    p, q, d = unit.shape_p, unit.shape_q, unit.width
    su = (p + q) * (x - unit.center)
    return q * d - su, p * d + su


def beta_eval(unit: BetaUnit, x: float) -> float:
    """Beta activation of ``unit`` at scalar ``x``.

    Returns exactly 0 on and outside the support edges and exactly 1 at the
    center.
    """
    if not (unit.lower < x < unit.upper):
        return 0.0
    to_upper, to_lower = _edge_distances(unit, x)
    if to_upper <= 0 or to_lower <= 0:
        return 0.0
    p, q, d = unit.shape_p, unit.shape_q, unit.width
    return (to_lower / (p * d)) ** p * (to_upper / (q * d)) ** q


def ab_factors(unit: BetaUnit, x: float) -> ABFactors:
    x0, x1 = unit.lower, unit.upper
    if not (x0 < x < x1):
        raise DomainError(f"x={x!r} is not strictly inside the support [{x0!r}, {x1!r}]")
    den_a, den_b = _edge_distances(unit, x)
    if den_a <= 0 or den_b <= 0:
        # Rounding can put x "inside" while a denominator has already hit zero.
        raise DomainError(f"x={x!r} is numerically on the support edge")
    return ABFactors(1.0 / den_a, 1.0 / den_b)


def activations(params: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Vectorised activations: ``(n_samples, k)`` matrix for ``(k, 4)`` params.

    Uses the same closed form as :func:`beta_eval`; entries on or outside a
    support are exactly 0.
    """
    params = np.asarray(params, dtype=float).reshape(-1, 4)
    x = np.asarray(x, dtype=float).reshape(-1, 1)
    xc, d, p, q = (params[:, i] for i in range(4))
    s = p + q
    su = s * (x - xc)
    to_upper = q * d - su
    to_lower = p * d + su
    inside = ((x > xc - d * p / s) & (x < xc + d * q / s) & (to_upper > 0) & (to_lower > 0))
    with np.errstate(invalid="ignore", divide="ignore"):
        out = (np.where(inside, to_lower, 1.0) / (p * d)) ** p * (np.where(inside, to_upper, 1.0) / (q * d)) ** q
    return np.where(inside, out, 0.0)


def design_matrix(units: Sequence[BetaUnit], x) -> np.ndarray:
    params = np.array([u.as_tuple() for u in units], dtype=float).reshape(-1, 4)
    return activations(params, x)


def forward(net: BetaNetwork, x: float) -> float:
    total = 0.0
    for unit, w in zip(net.units, net.weights):
        total += w * beta_eval(unit, x)
    return total


def predict(net: BetaNetwork, x) -> np.ndarray:
    """Network output for an array of inputs."""
    x = np.asarray(x, dtype=float).ravel()
    if not net.units:
        return np.zeros_like(x)
    return design_matrix(net.units, x) @ np.asarray(net.weights)


def solve_weights_matrix(phi: np.ndarray, y: np.ndarray, ridge: float = 1e-10) -> np.ndarray:
    """Least-squares weights for a precomputed design matrix."""
    if ridge < 0:
        raise ValueError(f"ridge must be >= 0, got {ridge!r}")
    phi = np.asarray(phi, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    n, k = phi.shape
    if k == 0:
        return np.zeros(0)
    if ridge > 0:
        phi = np.vstack([phi, math.sqrt(ridge) * np.eye(k)])
        y = np.concatenate([y, np.zeros(k)])
    # lstsq is SVD based and returns the minimum-norm solution when rank deficient.
    w, *_ = np.linalg.lstsq(phi, y, rcond=None)
    return w


def solve_weights(units: Sequence[BetaUnit], samples, ridge: float = 1e-10) -> tuple[float, ...]:
    """Minimise ``||t - Phi w||^2 + ridge * ||w||^2`` over the output weights."""
    if not units:
        raise ValueError("at least one unit is required")
    if len(samples) == 0:
        raise ValueError("at least one sample is required")
    phi = design_matrix(units, samples.x)
    return tuple(float(w) for w in solve_weights_matrix(phi, samples.y, ridge))


def sum_squared_residuals(net: BetaNetwork, samples) -> float:
    r = predict(net, samples.x) - samples.y
    return float(r @ r)


def training_error(net: BetaNetwork, samples) -> float:
    """Half the sum of squared residuals over every sample in ``samples``."""
    if len(samples) == 0:
        raise ValueError("error is undefined on an empty sample set")
    return 0.5 * sum_squared_residuals(net, samples)


def permuted(net: BetaNetwork, order: Iterable[int]) -> BetaNetwork:
    order = list(order)
    return BetaNetwork(
        tuple(net.units[i] for i in order), tuple(net.weights[i] for i in order)
    )
