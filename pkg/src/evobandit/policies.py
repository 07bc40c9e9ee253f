"""Recommendation policies and their per-(context, arm) bookkeeping.

Every policy implements the same two-call contract used by the simulation
loop: ``choose(context, t, rng)`` picks an arm without touching state, and
``observe(context, arm, reward, t)`` feeds the outcome back. Contexts and
arms are 1-based. All argmin/argmax ties break toward the lowest arm index
so runs are reproducible.
"""

from __future__ import annotations

import math

from .environment import RewardMatrix, UniformSource

__all__ = [
    "PolicyCounters",
    "Policy",
    "Oracle",
    "GreedyOracle",
    "RandomExploreCommit",
    "BalancedExploration",
    "RejectionArmElimination",
    "exploration_threshold",
]


def exploration_threshold(coefficient: float, horizon: int) -> int:
    """ceil(coefficient * ln(horizon)); counts are integers, so round up."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    return math.ceil(coefficient * math.log(horizon))


def _argmin(row: list[int]) -> int:
    """Index of the smallest entry, lowest index on ties (0-based)."""
    return min(range(len(row)), key=row.__getitem__)


def _argmax(row: list[int]) -> int:
    """Index of the largest entry; max() keeps the first one on ties."""
    return max(range(len(row)), key=row.__getitem__)


class PolicyCounters:
    """Cumulative reward / rejection / pull counts per (context, arm).

    The pull count equals rewards + rejections at all times; all three grids
    are kept explicitly because the policies read them on different paths.
    """

    __slots__ = ("n", "m", "rewards", "rejections", "pulls")

    def __init__(self, n: int, m: int) -> None:
        self.n = n
        self.m = m
        self.rewards = [[0] * m for _ in range(n)]
        self.rejections = [[0] * m for _ in range(n)]
        self.pulls = [[0] * m for _ in range(n)]

    def record(self, context: int, arm: int, reward: int) -> None:
        if not (1 <= context <= self.n and 1 <= arm <= self.m):
            raise IndexError(f"(context={context}, arm={arm}) outside 1..{self.n} x 1..{self.m}")
        if reward not in (0, 1):
            raise ValueError("reward must be 0 or 1")
        i, j = context - 1, arm - 1
        self.rewards[i][j] += reward
        self.rejections[i][j] += 1 - reward
        self.pulls[i][j] += 1

    def reward(self, context: int, arm: int) -> int:
        return self.rewards[context - 1][arm - 1]

    def rejection(self, context: int, arm: int) -> int:
        return self.rejections[context - 1][arm - 1]

    def pull(self, context: int, arm: int) -> int:
        return self.pulls[context - 1][arm - 1]

    def total_pulls(self) -> int:
        return sum(sum(row) for row in self.pulls)


class Policy:
    """Shared counter bookkeeping; subclasses add arm selection and phase state."""

    name = "policy"

    def __init__(self, n: int, m: int) -> None:
        if n < 1 or m < n:
            raise ValueError(f"need m >= n >= 1, got n={n}, m={m}")
        self.n = n
        self.m = m
        self.counters = PolicyCounters(n, m)

    def choose(self, context: int, t: int, rng: UniformSource) -> int:
        raise NotImplementedError

    def observe(self, context: int, arm: int, reward: int, t: int) -> None:
        self.counters.record(context, arm, reward)


class Oracle(Policy):
    """Knows the reward matrix; always pulls the arm with the globally highest
    success probability, regardless of context."""

    name = "oracle"

    def __init__(self, matrix: RewardMatrix) -> None:
        super().__init__(matrix.n, matrix.m)
        self.matrix = matrix
        column_max = [max(row[j] for row in matrix.probs) for j in range(matrix.m)]
        self.best_arm = max(range(matrix.m), key=column_max.__getitem__) + 1

    def choose(self, context: int, t: int, rng: UniformSource) -> int:
        return self.best_arm


class GreedyOracle(Policy):
    """Knows the reward matrix; pulls each arriving type's own best arm."""

    name = "greedy_oracle"

    def __init__(self, matrix: RewardMatrix) -> None:
        super().__init__(matrix.n, matrix.m)
        self.matrix = matrix
        self.best_arm_for = [
            max(range(matrix.m), key=row.__getitem__) + 1 for row in matrix.probs
        ]

    def choose(self, context: int, t: int, rng: UniformSource) -> int:
        return self.best_arm_for[context - 1]


class RandomExploreCommit(Policy):
    """Uniform exploration for ``explore_steps`` steps, then commit per context
    to the arm with the most accrued rewards at the end of exploration."""

    name = "rec"

    def __init__(self, n: int, m: int, explore_steps: int) -> None:
        super().__init__(n, m)
        if explore_steps < 0:
            raise ValueError("explore_steps must be >= 0")
        self.explore_steps = explore_steps
        self.committed: list[int | None] = [None] * n

    def _commit_all(self) -> None:
        self.committed = [
            _argmax(self.counters.rewards[i]) + 1 for i in range(self.n)
        ]

    def choose(self, context: int, t: int, rng: UniformSource) -> int:
        if t <= self.explore_steps:
            return int(rng.random() * self.m) + 1
        arm = self.committed[context - 1]
        if arm is None:
            # Normally set when step explore_steps is observed; recover if the
            # policy is driven straight into the exploitation phase.
            self._commit_all()
            arm = self.committed[context - 1]
        return arm

    def observe(self, context: int, arm: int, reward: int, t: int) -> None:
        super().observe(context, arm, reward, t)
        if t == self.explore_steps:
            self._commit_all()


class BalancedExploration(Policy):
    """Explore until every arm of the arriving type has accrued ``min_reward``
    rewards, always pulling the reward-poorest arm; afterwards pull the arm
    that needed the fewest pulls, read from a snapshot of the pull counts
    taken at the exploration clock tau.

    ``tau_scope`` picks the clock semantics. With "context" (default), each
    type keeps its own tau: its snapshot row freezes when its own exploration
    ends, so the commitment reflects which arm reached the reward target
    fastest. With "global", any type's exploration step refreshes one shared
    tau and the whole snapshot; a type that is already exploiting then sees
    its own exploit pulls flow back into later snapshots, which drives its
    pull counts toward equality and randomises its eventual commitment.
    """

    name = "be"

    def __init__(self, n: int, m: int, min_reward: int, tau_scope: str = "context") -> None:
        super().__init__(n, m)
        if min_reward < 0:
            raise ValueError("min_reward must be >= 0")
        if tau_scope not in ("context", "global"):
            raise ValueError(f'tau_scope must be "context" or "global", got {tau_scope!r}')
        self.min_reward = min_reward
        self.tau_scope = tau_scope
        self.last_explore_step: list[int | None] | int | None = (
            [None] * n if tau_scope == "context" else None
        )
        self.pull_snapshot = [[0] * m for _ in range(n)]

    def _exploring(self, context: int) -> bool:
        return min(self.counters.rewards[context - 1]) < self.min_reward

    def choose(self, context: int, t: int, rng: UniformSource) -> int:
        i = context - 1
        if self._exploring(context):
            return _argmin(self.counters.rewards[i]) + 1
        return _argmin(self.pull_snapshot[i]) + 1

    def observe(self, context: int, arm: int, reward: int, t: int) -> None:
        explored = self._exploring(context)
        super().observe(context, arm, reward, t)
        if not explored:
            return
        if self.tau_scope == "context":
            i = context - 1
            self.last_explore_step[i] = t
            self.pull_snapshot[i] = self.counters.pulls[i].copy()
        else:
            self.last_explore_step = t
            self.pull_snapshot = [row.copy() for row in self.counters.pulls]


class RejectionArmElimination(Policy):
    """Sample uniformly from a per-context active set; drop arms whose
    rejection count exceeds ``max_rejections``. Active sets only shrink and
    never empty: if the last survivors all cross the threshold at once, the
    arm with the fewest rejections is kept.
    """

    name = "rbae"

    def __init__(self, n: int, m: int, max_rejections: int) -> None:
        super().__init__(n, m)
        if max_rejections < 0:
            raise ValueError("max_rejections must be >= 0")
        self.max_rejections = max_rejections
        self.active: list[list[int]] = [list(range(1, m + 1)) for _ in range(n)]

    def choose(self, context: int, t: int, rng: UniformSource) -> int:
        arms = self.active[context - 1]
        if len(arms) == 1:
            return arms[0]
        return arms[int(rng.random() * len(arms))]

    def observe(self, context: int, arm: int, reward: int, t: int) -> None:
        super().observe(context, arm, reward, t)
        i = context - 1
        rejections = self.counters.rejections[i]
        kept = [j for j in self.active[i] if rejections[j - 1] <= self.max_rejections]
        if not kept:
            kept = [min(self.active[i], key=lambda j: (rejections[j - 1], j))]
        self.active[i] = kept
