"""Online gradient descent on centers, widths, shape exponents and weights.

The per-sample update for unit ``i`` with residual ``e = t - f(x)`` is

    dw  = lr * e * beta
    dxc = lr * e * w * beta * (p + q) * (q*A - p*B)
    dd  = lr * e * w * beta * (x - xc) / d * (p + q) * (q*A - p*B)
    dp  = lr * e * w * beta * (ln(1 / (B*p*d)) - q * (x - xc) * (A + B))
    dq  = lr * e * w * beta * (ln(1 / (A*q*d)) + p * (x - xc) * (A + B))

with ``A = 1 / (q*d - (p+q)(x-xc))`` and ``B = 1 / (p*d + (p+q)(x-xc))``.
Each bracket is the exact partial derivative of the activation; see
:func:`gradient_check`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .core import BetaNetwork, BetaUnit, DomainError, InvalidParameter, ab_factors, beta_eval, forward, training_error
from .evolution import ParamBounds


@dataclass(frozen=True)
class GradientConfig:
    learning_rate: float = 5e-4
    max_iterations: int = 20000
    target_error: float = 0.0
    bounds: ParamBounds = field(default_factory=ParamBounds)

    def __post_init__(self):
        if not (self.learning_rate >= 0 and math.isfinite(self.learning_rate)):
            raise InvalidParameter("learning_rate", f"must be a finite value >= 0, got {self.learning_rate!r}")
        if (isinstance(self.max_iterations, bool) or not isinstance(self.max_iterations, (int, np.integer))
                or self.max_iterations < 1):
            raise InvalidParameter("max_iterations", f"must be a positive integer, got {self.max_iterations!r}")
        if not self.target_error >= 0:
            raise InvalidParameter("target_error", f"must be >= 0, got {self.target_error!r}")
        if not isinstance(self.bounds, ParamBounds):
            raise InvalidParameter("bounds", "must be a ParamBounds")


@dataclass(frozen=True)
class UnitGradient:
    d_weight: float = 0.0
    d_center: float = 0.0
    d_width: float = 0.0
    d_p: float = 0.0
    d_q: float = 0.0

    def __post_init__(self):
        for name in ("d_weight", "d_center", "d_width", "d_p", "d_q"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} is not finite")


def beta_partials(unit: BetaUnit, x: float, pb_sign: float = -1.0) -> tuple[float, float, float, float]:
    """Analytic partials of the activation w.r.t. (center, width, p, q).

    ``pb_sign`` is the sign of the ``p*B`` term in the center and width
    brackets. Only -1 is correct; +1 exists so tests can show the other sign
    fails a finite-difference check.
    """
    ab = ab_factors(unit, x)
    a, b = ab.a, ab.b
    p, q, d = unit.shape_p, unit.shape_q, unit.width
    u = x - unit.center
    beta = beta_eval(unit, x)
    shift = (p + q) * (q * a + pb_sign * p * b)
    return (
        beta * shift,
        beta * (u / d) * (p + q) * (q * a - p * b),
        beta * (math.log(1.0 / (b * p * d)) - q * u * (a + b)),
        beta * (math.log(1.0 / (a * q * d)) + p * u * (a + b)),
    )


def unit_deltas(net: BetaNetwork, unit_index: int, x: float, target: float,
                lr: float) -> UnitGradient:
    unit = net.units[unit_index]
    if not unit.lower < x < unit.upper:
        return UnitGradient()
    try:
        g_c, g_d, g_p, g_q = beta_partials(unit, x)
    except DomainError:
        return UnitGradient()
    e = target - forward(net, x)
    w = net.weights[unit_index]
    scale = lr * e * w
    return UnitGradient(
        d_weight=lr * e * beta_eval(unit, x),
        d_center=scale * g_c,
        d_width=scale * g_d,
        d_p=scale * g_p,
        d_q=scale * g_q,
    )


@numba.njit(cache=True)
def _epoch_kernel(params, w, xs, ts, lr, lo, hi):  # pragma: no cover - compiled
    k = params.shape[0]
    beta = np.zeros(k)
    for j in range(xs.shape[0]):
        x = xs[j]
        y = 0.0
        for i in range(k):
            xc, d, p, q = params[i, 0], params[i, 1], params[i, 2], params[i, 3]
            s = p + q
            b = 0.0
            if xc - d * p / s < x < xc + d * q / s:
                su = s * (x - xc)
                to_upper = q * d - su
                to_lower = p * d + su
                if to_upper > 0.0 and to_lower > 0.0:
                    b = (to_lower / (p * d)) ** p * (to_upper / (q * d)) ** q
            beta[i] = b
            y += w[i] * b
        e = ts[j] - y
        if e == 0.0:
            continue
        for i in range(k):
            b = beta[i]
            if b == 0.0:
                continue
            xc, d, p, q = params[i, 0], params[i, 1], params[i, 2], params[i, 3]
            s = p + q
            u = x - xc
            den_a = q * d - s * u
            den_b = p * d + s * u
            if den_a <= 0.0 or den_b <= 0.0:
                continue
            a = 1.0 / den_a
            bb = 1.0 / den_b
            scale = lr * e * w[i] * b
            shift = s * (q * a - p * bb)
            new_xc = xc + scale * shift
            new_d = d + scale * (u / d) * shift
            new_p = p + scale * (math.log(1.0 / (bb * p * d)) - q * u * (a + bb))
            new_q = q + scale * (math.log(1.0 / (a * q * d)) + p * u * (a + bb))
            w[i] += lr * e * b
            params[i, 0] = min(max(new_xc, lo[0]), hi[0])
            params[i, 1] = min(max(new_d, lo[1]), hi[1])
            params[i, 2] = min(max(new_p, lo[2]), hi[2])
            params[i, 3] = min(max(new_q, lo[3]), hi[3])


def epoch(net: BetaNetwork, train, cfg: GradientConfig) -> BetaNetwork:
    """One pass over ``train`` in stored order, updating after every sample.

    All deltas for a sample are computed from the network as it stood before
    that sample; parameters are then clamped into ``cfg.bounds``.
    """
    if len(net) == 0:
        return net
    params = net.param_array()
    w = np.array(net.weights, dtype=float)
    _epoch_kernel(params, w, np.ascontiguousarray(train.x), np.ascontiguousarray(train.y),
                  float(cfg.learning_rate), cfg.bounds.lows(), cfg.bounds.highs())
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(params))):
        raise FloatingPointError("gradient epoch diverged")
    return BetaNetwork.from_arrays(params, w)


def refine(net: BetaNetwork, train, cfg: GradientConfig) -> tuple[BetaNetwork, int, float]:
    """Run epochs until the error drops below ``cfg.target_error`` or the
    iteration budget is spent.

    Returns the lowest-error network seen (the input counts), the number of
    epochs run and that network's error.
    """
    best = net
    best_err = training_error(net, train)
    current, err = net, best_err
    iterations = 0
    while err >= cfg.target_error and iterations < cfg.max_iterations:
        try:
            current = epoch(current, train, cfg)
        except FloatingPointError:
            break
        iterations += 1
        err = training_error(current, train)
        if not math.isfinite(err):
            break
        if err < best_err:
            best, best_err = current, err
    return best, iterations, best_err


def finite_difference_partials(unit: BetaUnit, x: float, step: float) -> tuple[float, ...]:
    """Central differences of the activation w.r.t. each of the four parameters."""
    base = list(unit.as_tuple())
    out = []
    for j in range(4):
        plus, minus = list(base), list(base)
        plus[j] += step
        minus[j] -= step
        out.append((beta_eval(BetaUnit(*plus), x) - beta_eval(BetaUnit(*minus), x)) / (2 * step))
    return tuple(out)


def gradient_check(unit: BetaUnit, weight: float, x: float, step: float = 1e-6,
                   pb_sign: float = -1.0, scale_floor: float = 1e-3) -> float:
    """Worst relative error between analytic and finite-difference partials.

    The analytic side is each parameter delta divided by ``lr * e * weight``,
    so ``weight`` cancels and is accepted only to mirror :func:`unit_deltas`.
    Each component's discrepancy is scaled by the largest partial (either
    side) at that point, floored at ``scale_floor``: a partial that is itself
    near zero, as the shape partials are close to the center, would otherwise
    compare finite-difference round-off against nothing.
    """
    if step <= 0:
        raise ValueError(f"step must be > 0, got {step!r}")
    margin = 10 * step
    if not (unit.lower + margin < x < unit.upper - margin):
        raise DomainError(
            f"x={x!r} is within {margin:g} of the support edges [{unit.lower!r}, {unit.upper!r}]"
        )
    analytic = beta_partials(unit, x, pb_sign=pb_sign)
    numeric = finite_difference_partials(unit, x, step)
    scale = max(max(abs(v) for v in analytic), max(abs(v) for v in numeric), scale_floor)
    return max(abs(a - n) for a, n in zip(analytic, numeric)) / scale
