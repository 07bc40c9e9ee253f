"""Mean-field analysis of the two-type, two-arm system.

With stationary pull probabilities the expected one-step change of the first
type's arrival share d1 is a quadratic in d1 scaled by the decaying step
size. Converting that difference equation to continuous time gives

    d(d1)/dt = delta / (delta + sqrt(t)) * (a (1-d1)^2 + b d1 (1-d1) - c d1^2)

whose coefficients come from the pull probabilities and the reward matrix.
This module builds those coefficients, evaluates the exact discrete
expected increment, integrates the ODE with classical RK4, and compares the
ODE trajectory against Monte Carlo simulation of the true dynamics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .environment import RewardMatrix
from .streams import numpy_stream

__all__ = [
    "DimensionError",
    "PullProbabilities",
    "OdeCoefficients",
    "MeanFieldTrajectory",
    "MeanFieldComparison",
    "ode_coefficients",
    "ode_rhs",
    "expected_increment",
    "integrate",
    "mean_field_comparison",
]


class DimensionError(ValueError):
    """The mean-field machinery only covers the 2x2 case."""


def _require_2x2(n: int, m: int) -> None:
    if (n, m) != (2, 2):
        raise DimensionError(f"analysis requires n = m = 2, got n={n}, m={m}")


@dataclass(frozen=True)
class PullProbabilities:
    """probs[i][j] = probability of pulling arm j+1 on context i+1; rows sum to 1."""

    probs: tuple[tuple[float, float], tuple[float, float]]

    def __post_init__(self) -> None:
        for row in self.probs:
            if any(p < 0.0 or p > 1.0 for p in row):
                raise ValueError(f"pull probabilities {row} outside [0, 1]")
            if abs(sum(row) - 1.0) > 1e-9:
                raise ValueError(f"pull probabilities {row} do not sum to 1")

    def prob(self, context: int, arm: int) -> float:
        return self.probs[context - 1][arm - 1]

    @classmethod
    def identity(cls) -> "PullProbabilities":
        """Each type gets its own arm (how the greedy oracle pulls)."""
        return cls(((1.0, 0.0), (0.0, 1.0)))

    @classmethod
    def fixed_arm(cls, arm: int) -> "PullProbabilities":
        """Both types get the same arm (how the oracle pulls)."""
        if arm not in (1, 2):
            raise ValueError("arm must be 1 or 2")
        row = (1.0, 0.0) if arm == 1 else (0.0, 1.0)
        return cls((row, row))

    @classmethod
    def uniform(cls) -> "PullProbabilities":
        return cls(((0.5, 0.5), (0.5, 0.5)))


@dataclass(frozen=True)
class OdeCoefficients:
    """Quadratic drift coefficients: a inflow at d1=0, c outflow at d1=1."""

    a: float
    b: float
    c: float
    delta: float

    def __post_init__(self) -> None:
        if self.delta < 0.0:
            raise ValueError("delta must be >= 0")


@dataclass(frozen=True)
class MeanFieldTrajectory:
    times: np.ndarray
    d1: np.ndarray

    def __post_init__(self) -> None:
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if np.any((self.d1 < 0.0) | (self.d1 > 1.0)):
            raise ValueError("d1 values must stay in [0, 1]")

    def final(self) -> float:
        return float(self.d1[-1])


def ode_coefficients(
    matrix: RewardMatrix, pulls: PullProbabilities, delta: float
) -> OdeCoefficients:
    """Drift coefficients for fixed pull probabilities over a 2x2 matrix."""
    _require_2x2(matrix.n, matrix.m)
    mu = matrix.probs
    p = pulls.probs
    a = p[1][0] * mu[1][0]
    b = p[0][0] * mu[0][0] - p[1][1] * mu[1][1]
    c = p[0][1] * mu[0][1]
    return OdeCoefficients(a=a, b=b, c=c, delta=delta)


def ode_rhs(d1: float, t: float, coeffs: OdeCoefficients) -> float:
    """Instantaneous drift of d1 at time t."""
    one = 1.0 - d1
    drift = coeffs.a * one * one + coeffs.b * one * d1 - coeffs.c * d1 * d1
    return coeffs.delta / (coeffs.delta + math.sqrt(t)) * drift


def expected_increment(
    d1: float, t: float, matrix: RewardMatrix, pulls: PullProbabilities, delta: float
) -> float:
    """Exact one-step expected change of d1 under the stochastic update.

    Algebraically identical to ``ode_rhs`` with the matching coefficients:
    the gain term is the probability the first type's arm gets rewarded, the
    loss term the same for the second, each weighted by how much the
    renormalised update actually moves d1.
    """
    _require_2x2(matrix.n, matrix.m)
    mu = matrix.probs
    p = pulls.probs
    step = delta / math.sqrt(t)
    weight = step / (1.0 + step)
    gain = d1 * p[0][0] * mu[0][0] + (1.0 - d1) * p[1][0] * mu[1][0]
    loss = d1 * p[0][1] * mu[0][1] + (1.0 - d1) * p[1][1] * mu[1][1]
    return weight * ((1.0 - d1) * gain - d1 * loss)


def integrate(
    coeffs: OdeCoefficients,
    d1_init: float,
    t_start: float = 1.0,
    t_end: float = 5000.0,
    step: float = 1.0,
) -> MeanFieldTrajectory:
    """Classical fourth-order Runge-Kutta on a uniform grid.

    The drift vanishes at whichever boundary it points out of, so clamping
    to [0, 1] only mops up rounding noise.
    """
    if not 0.0 <= d1_init <= 1.0:
        raise ValueError("d1_init must lie in [0, 1]")
    if t_start < 1.0:
        raise ValueError("time starts at 1")
    if step <= 0.0:
        raise ValueError("step must be positive")
    if t_end < t_start:
        raise ValueError("t_end must be >= t_start")

    span = t_end - t_start
    n_steps = max(int(round(span / step)), 0)
    if abs(t_start + n_steps * step - t_end) > 1e-9 * max(1.0, t_end):
        n_steps = int(math.floor(span / step))

    times = [t_start]
    values = [d1_init]
    t = t_start
    y = d1_init
    h = step

    def advance(t: float, y: float, h: float) -> float:
        k1 = ode_rhs(y, t, coeffs)
        k2 = ode_rhs(y + 0.5 * h * k1, t + 0.5 * h, coeffs)
        k3 = ode_rhs(y + 0.5 * h * k2, t + 0.5 * h, coeffs)
        k4 = ode_rhs(y + h * k3, t + h, coeffs)
        y = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        return min(max(y, 0.0), 1.0)

    for k in range(1, n_steps + 1):
        y = advance(t, y, h)
        t = t_start + k * h
        times.append(t)
        values.append(y)
    if t < t_end - 1e-9 * max(1.0, t_end):
        y = advance(t, y, t_end - t)
        times.append(t_end)
        values.append(y)

    return MeanFieldTrajectory(times=np.asarray(times), d1=np.asarray(values))


@dataclass(frozen=True)
class MeanFieldComparison:
    """Empirical mean d1 curve vs the ODE solution on the integer time grid."""

    times: np.ndarray
    simulated: np.ndarray
    ode: np.ndarray
    gap: float

    def rows(self):
        """(t, series, value) rows in the experiment CSV schema."""
        for label, series in (("d1:simulation", self.simulated), ("d1:ode", self.ode)):
            for t, v in zip(self.times, series):
                yield int(t), label, float(v)


def simulate_mean_d1(
    matrix: RewardMatrix,
    pulls: PullProbabilities,
    delta: float,
    d1_init: float,
    horizon: int,
    num_runs: int,
    seed: int = 0,
) -> np.ndarray:
    """Pointwise mean of d1(t) over independent runs under fixed pull probabilities.

    d1(t) is the share at the start of step t; all runs advance in lock-step
    as vectors. The update mirrors ``environment.evolve`` operation for
    operation so single runs agree bitwise with the scalar path.
    """
    _require_2x2(matrix.n, matrix.m)
    if delta < 0.0:
        raise ValueError("delta must be >= 0")
    rng = numpy_stream(seed, 3, 0)
    mu = np.asarray(matrix.probs)
    p = np.asarray(pulls.probs)

    d1 = np.full(num_runs, float(d1_init))
    means = np.empty(horizon)
    for t in range(1, horizon + 1):
        means[t - 1] = d1.mean()
        ctx2 = rng.random(num_runs) >= d1
        p_arm1 = np.where(ctx2, p[1, 0], p[0, 0])
        arm2 = rng.random(num_runs) >= p_arm1
        success = rng.random(num_runs) < mu[ctx2.astype(np.intp), arm2.astype(np.intp)]
        step = delta / math.sqrt(t)
        scale = 1.0 + step
        d1 = np.where(
            success & ~arm2, (d1 + step) / scale, np.where(success & arm2, d1 / scale, d1)
        )
    return means


def mean_field_comparison(
    matrix: RewardMatrix,
    pulls: PullProbabilities,
    delta: float,
    d1_init: float,
    horizon: int,
    num_runs: int,
    seed: int = 0,
) -> MeanFieldComparison:
    """Monte Carlo mean of d1(t) vs the RK4 solution; reports the sup-norm gap."""
    simulated = simulate_mean_d1(matrix, pulls, delta, d1_init, horizon, num_runs, seed)
    coeffs = ode_coefficients(matrix, pulls, delta)
    trajectory = integrate(coeffs, d1_init, t_start=1.0, t_end=float(horizon), step=1.0)
    times = np.arange(1, horizon + 1)
    ode_curve = np.interp(times, trajectory.times, trajectory.d1)
    gap = float(np.max(np.abs(simulated - ode_curve))) if horizon else 0.0
    return MeanFieldComparison(times=times, simulated=simulated, ode=ode_curve, gap=gap)
