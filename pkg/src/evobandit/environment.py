"""Bandit environment: reward matrix, arrival distribution, and its evolution.

Contexts (user types) are numbered 1..n and arms 1..m throughout the public
API, matching the usual bandit notation. A step works on value types: given
the current arrival distribution d(t), a context is drawn, an arm is pulled,
a Bernoulli reward lands, and a reward of 1 tilts d toward the pulled arm's
type with a step size that decays like 1/sqrt(t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Protocol, Sequence

__all__ = [
    "RewardMatrixError",
    "ShapeError",
    "EntryOutOfRange",
    "DiagonalNotMaximal",
    "RowsUnordered",
    "ArmHasNoContext",
    "RewardMatrix",
    "PopulationDistribution",
    "EvolutionParams",
    "StepOutcome",
    "UniformSource",
    "validate_matrix",
    "sample_context",
    "sample_reward",
    "evolve",
]

SIMPLEX_TOL = 1e-9


class UniformSource(Protocol):
    """Anything with a ``random() -> float in [0, 1)`` method."""

    def random(self) -> float: ...


class RewardMatrixError(ValueError):
    """A candidate reward matrix violates a structural constraint."""


class ShapeError(RewardMatrixError):
    """Matrix is not rectangular, empty, or has fewer arms than contexts."""


class EntryOutOfRange(RewardMatrixError):
    """Some success probability lies outside [0, 1]."""


class DiagonalNotMaximal(RewardMatrixError):
    """Some row's maximum sits off the diagonal."""


class RowsUnordered(RewardMatrixError):
    """Diagonal entries are not non-increasing."""


class ArmHasNoContext(ValueError):
    """A reward-1 pull landed on an arm with no matching context type (arm > n)."""


@dataclass(frozen=True)
class RewardMatrix:
    """n x m grid of Bernoulli success probabilities.

    Invariants (enforced by :func:`validate_matrix`): every entry in [0, 1],
    each row's maximum on the diagonal, and diagonal entries non-increasing
    from row 1 down. Always build instances through ``validate_matrix``.
    """

    probs: tuple[tuple[float, ...], ...]

    @property
    def n(self) -> int:
        return len(self.probs)

    @property
    def m(self) -> int:
        return len(self.probs[0])

    def prob(self, context: int, arm: int) -> float:
        """Success probability for 1-based (context, arm)."""
        if not (1 <= context <= self.n and 1 <= arm <= self.m):
            raise IndexError(f"(context={context}, arm={arm}) outside 1..{self.n} x 1..{self.m}")
        return self.probs[context - 1][arm - 1]

    def as_lists(self) -> list[list[float]]:
        return [list(row) for row in self.probs]


def validate_matrix(raw: Sequence[Sequence[float]]) -> RewardMatrix:
    """Check the structural constraints and wrap ``raw`` in a RewardMatrix.

    Raises ShapeError, EntryOutOfRange, DiagonalNotMaximal, or RowsUnordered.
    The input is copied, never mutated.
    """
    rows = [tuple(float(x) for x in row) for row in raw]
    if not rows:
        raise ShapeError("matrix must have at least one row")
    n = len(rows)
    m = len(rows[0])
    if any(len(row) != m for row in rows):
        raise ShapeError("matrix rows have unequal lengths")
    if m < n:
        raise ShapeError(f"need at least as many arms as contexts (n={n}, m={m})")
    for i, row in enumerate(rows):
        for j, value in enumerate(row):
            if not (0.0 <= value <= 1.0) or math.isnan(value):
                raise EntryOutOfRange(f"entry ({i + 1},{j + 1}) = {value} outside [0, 1]")
    for i, row in enumerate(rows):
        if max(row) > row[i]:
            raise DiagonalNotMaximal(
                f"row {i + 1} max {max(row)} exceeds diagonal entry {row[i]}"
            )
    for i in range(n - 1):
        if rows[i][i] < rows[i + 1][i + 1]:
            raise RowsUnordered(
                f"diagonal must be non-increasing: row {i + 1} has {rows[i][i]}"
                f" < row {i + 2}'s {rows[i + 1][i + 1]}"
            )
    return RewardMatrix(tuple(rows))


@dataclass(frozen=True)
class PopulationDistribution:
    """Arrival probabilities of the context types: a point on the simplex."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise ValueError("distribution must have at least one entry")
        total = 0.0
        for v in self.values:
            if v < 0.0 or math.isnan(v):
                raise ValueError(f"negative or NaN entry {v} in distribution")
            total += v
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise ValueError(f"distribution sums to {total!r}, not 1")

    @property
    def n(self) -> int:
        return len(self.values)

    @classmethod
    def uniform(cls, n: int) -> "PopulationDistribution":
        return cls(tuple(1.0 / n for _ in range(n)))

    @classmethod
    def _trusted(cls, values: tuple[float, ...]) -> "PopulationDistribution":
        # Skips __post_init__ for values the caller has already proven valid;
        # only the evolve update uses this (it rescales by the exact new sum).
        obj = object.__new__(cls)
        object.__setattr__(obj, "values", values)
        return obj


@dataclass(frozen=True)
class EvolutionParams:
    """Externality step size. The decay exponent is fixed at 1/2.

    ``strict`` controls what a reward-1 pull on an arm without a matching
    context type (arm > n, only possible when m > n) does: raise
    ArmHasNoContext when strict, leave the distribution unchanged otherwise.
    """

    delta: float
    strict: bool = True

    def __post_init__(self) -> None:
        if not self.delta > 0.0:
            raise ValueError(f"delta must be positive, got {self.delta}")


@dataclass(frozen=True)
class StepOutcome:
    """One simulated time step: who arrived, what was pulled, what happened."""

    t: int
    context: int
    arm: int
    reward: int
    d_after: PopulationDistribution = field(repr=False)

    def __post_init__(self) -> None:
        if self.t < 1:
            raise ValueError("time index starts at 1")
        if not 1 <= self.context <= self.d_after.n:
            raise ValueError(f"context {self.context} outside 1..{self.d_after.n}")
        if self.arm < 1:
            raise ValueError(f"arm {self.arm} outside 1..m")
        if self.reward not in (0, 1):
            raise ValueError("reward must be 0 or 1")


def sample_context(d: PopulationDistribution, rng: UniformSource) -> int:
    """Draw a context index in 1..n with probabilities d; one uniform consumed."""
    u = rng.random()
    acc = 0.0
    last_positive = 1
    for i, p in enumerate(d.values):
        if p > 0.0:
            last_positive = i + 1
        acc += p
        if u < acc:
            return i + 1
    # Guard against the accumulated sum rounding below u.
    return last_positive


def sample_reward(matrix: RewardMatrix, context: int, arm: int, rng: UniformSource) -> int:
    """Bernoulli draw with success probability prob(context, arm); one uniform consumed."""
    if not (1 <= context <= len(matrix.probs) and 1 <= arm <= len(matrix.probs[0])):
        raise IndexError(
            f"(context={context}, arm={arm}) outside 1..{matrix.n} x 1..{matrix.m}"
        )
    return 1 if rng.random() < matrix.probs[context - 1][arm - 1] else 0


def _evolved_values(
    values: tuple[float, ...], arm: int, t: int, delta: float
) -> tuple[float, ...]:
    step = delta / math.sqrt(t)
    scale = 1.0 + step
    out = [v / scale for v in values]
    out[arm - 1] = (values[arm - 1] + step) / scale
    return tuple(out)


def evolve(
    d: PopulationDistribution,
    arm: int,
    reward: int,
    t: int,
    params: EvolutionParams,
) -> PopulationDistribution:
    """Shift the arrival distribution toward the pulled arm's type on reward 1.

    The raw update adds delta/sqrt(t) to the pulled component; renormalising
    divides everything by exactly 1 + delta/sqrt(t), since that is what the
    sum grew by. A zero reward returns the input unchanged.
    """
    if t < 1:
        raise ValueError("time index starts at 1")
    if arm < 1:
        raise ValueError(f"arm must be >= 1, got {arm}")
    if reward not in (0, 1):
        raise ValueError("reward must be 0 or 1")
    if reward == 0:
        return d
    if arm > len(d.values):
        if params.strict:
            raise ArmHasNoContext(
                f"reward-1 pull on arm {arm} but only {d.n} context types exist"
            )
        return d
    return PopulationDistribution._trusted(_evolved_values(d.values, arm, t, params.delta))
