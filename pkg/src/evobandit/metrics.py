"""Cumulative reward and Oracle-relative regret across replications."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .environment import StepOutcome

__all__ = [
    "HorizonMismatch",
    "RunRecord",
    "RegretSeries",
    "cumulative_reward",
    "mean_regret",
]


class HorizonMismatch(ValueError):
    """Run records being aggregated do not share the same horizon."""


def cumulative_reward(rewards: Sequence[int]) -> np.ndarray:
    """Prefix sums of a 0/1 reward sequence."""
    arr = np.asarray(rewards, dtype=np.int64)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("rewards must be 0 or 1")
    return np.cumsum(arr)


@dataclass
class RunRecord:
    """Trajectory of a single replication of one policy.

    ``total_reward`` is the cumulative reward R_t for t = 1..T and ``d1`` is
    the first component of the arrival distribution at the *start* of each
    step (so d1[0] is the configured initial share). ``steps`` carries the
    full per-step log only when the run was made with full logging on.
    """

    policy: str
    replication: int
    seed_key: tuple[int, ...]
    total_reward: np.ndarray
    d1: np.ndarray
    steps: list[StepOutcome] | None = field(default=None, repr=False)

    @property
    def horizon(self) -> int:
        return int(self.total_reward.shape[0])

    def check(self) -> None:
        """Assert the structural invariants; used by tests."""
        r = self.total_reward
        if r.ndim != 1 or self.d1.shape != r.shape:
            raise ValueError("reward and d1 series must be equal-length vectors")
        if r.size:
            increments = np.diff(np.concatenate(([0], r)))
            if not np.isin(increments, (0, 1)).all():
                raise ValueError("cumulative reward must grow by 0 or 1 per step")
            if r[-1] > r.size:
                raise ValueError("cumulative reward cannot exceed t")


@dataclass
class RegretSeries:
    """Mean cumulative-reward shortfall of a policy relative to the Oracle."""

    policy: str
    times: np.ndarray
    values: np.ndarray

    def final(self) -> float:
        return float(self.values[-1])


def _mean_total_reward(runs: Sequence[RunRecord]) -> np.ndarray:
    horizons = {run.horizon for run in runs}
    if len(horizons) != 1:
        raise HorizonMismatch(f"mixed horizons {sorted(horizons)}")
    return np.mean([run.total_reward for run in runs], axis=0)


def mean_regret(policy_runs: Sequence[RunRecord], oracle_runs: Sequence[RunRecord]) -> RegretSeries:
    """mean-over-oracle-runs R_t minus mean-over-policy-runs R_t.

    The two run sets are independent replications; no pathwise coupling is
    assumed. Raises HorizonMismatch when the horizons differ.
    """
    if not policy_runs or not oracle_runs:
        raise ValueError("need at least one run on each side")
    policy_mean = _mean_total_reward(policy_runs)
    oracle_mean = _mean_total_reward(oracle_runs)
    if policy_mean.shape != oracle_mean.shape:
        raise HorizonMismatch(
            f"policy horizon {policy_mean.shape[0]} != oracle horizon {oracle_mean.shape[0]}"
        )
    times = np.arange(1, policy_mean.shape[0] + 1)
    label = policy_runs[0].policy
    return RegretSeries(policy=label, times=times, values=oracle_mean - policy_mean)
