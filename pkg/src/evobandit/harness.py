"""Experiment orchestration: seeded replications, random instances, CSV output.

A full experiment runs every configured policy for ``iterations``
replications of ``horizon`` steps each. Replications are independent: each
gets its own uniform stream derived from the master seed, its own fresh
policy instance, and its own copy of the environment (policies never share
a world; each one's rewards reshape only its own arrival distribution).
Matrices and random initial distributions are shared across policies within
a replication so the comparison is like-for-like.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Iterable

import numpy as np

from .environment import (
    EvolutionParams,
    PopulationDistribution,
    RewardMatrix,
    StepOutcome,
    UniformSource,
    evolve,
    sample_context,
    sample_reward,
    validate_matrix,
)
from .metrics import RegretSeries, RunRecord
from .policies import (
    BalancedExploration,
    GreedyOracle,
    Oracle,
    Policy,
    RandomExploreCommit,
    RejectionArmElimination,
    exploration_threshold,
)
from .streams import uniform_stream

__all__ = [
    "ConfigError",
    "POLICY_NAMES",
    "ExperimentConfig",
    "ExperimentResult",
    "default_explore_steps",
    "make_policy",
    "random_matrix",
    "random_initial_distribution",
    "simulate_run",
    "run_experiment",
    "write_csv",
    "write_rows_csv",
]

POLICY_NAMES = ("oracle", "greedy_oracle", "rec", "be", "rbae")

# Stream namespaces under the master seed: policy runs, matrix blocks,
# random initial distributions. analysis.simulate_mean_d1 reserves 3.
_RUN_STREAM = 0
_MATRIX_STREAM = 1
_INIT_STREAM = 2


class ConfigError(ValueError):
    """Experiment configuration is malformed or inconsistent."""


def default_explore_steps(horizon: int) -> int:
    """floor(sqrt(T)) exploration steps for the explore-then-commit policy."""
    return math.isqrt(horizon)


@dataclass(frozen=True)
class ExperimentConfig:
    """Full parameterization of one experiment.

    ``matrix`` is either an explicit grid (validated) or "random";
    ``d_init`` is either an explicit distribution or "random" (drawn fresh
    per replication, shared across policies). ``matrix_refresh_every`` only
    applies to random matrices: a new one is drawn every that-many
    replications (0 = a single draw reused everywhere).
    """

    n: int = 2
    m: int = 2
    horizon: int = 5000
    iterations: int = 500
    delta: float = 0.01
    d_init: str | tuple[float, ...] = (0.5, 0.5)
    matrix: str | tuple[tuple[float, ...], ...] = "random"
    matrix_refresh_every: int = 0
    policies: tuple[str, ...] = POLICY_NAMES
    explore_steps: int | None = None
    min_reward_coeff: float = 3.0
    max_rejections_coeff: float = 3.0
    be_tau_scope: str = "context"
    seed: int = 0
    output_path: str | None = None
    full_log: bool = False
    strict_evolution: bool = True

    def validated(self) -> "ExperimentConfig":
        """Normalise and check the config; returns a canonical copy."""
        cfg = self
        if cfg.horizon < 1:
            raise ConfigError("horizon must be >= 1")
        if cfg.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if cfg.delta <= 0:
            raise ConfigError("delta must be positive")
        if not cfg.policies:
            raise ConfigError("policies must be non-empty")
        unknown = [p for p in cfg.policies if p not in POLICY_NAMES]
        if unknown:
            raise ConfigError(f"unknown policies {unknown}; valid: {list(POLICY_NAMES)}")
        if len(set(cfg.policies)) != len(cfg.policies):
            raise ConfigError("duplicate policy names")
        if cfg.matrix_refresh_every < 0:
            raise ConfigError("matrix_refresh_every must be >= 0")
        if cfg.explore_steps is not None and cfg.explore_steps < 0:
            raise ConfigError("explore_steps must be >= 0")
        if cfg.be_tau_scope not in ("context", "global"):
            raise ConfigError(f'be_tau_scope must be "context" or "global", got {cfg.be_tau_scope!r}')

        if isinstance(cfg.matrix, str):
            if cfg.matrix != "random":
                raise ConfigError(f'matrix must be a grid or "random", got {cfg.matrix!r}')
            if cfg.n < 1 or cfg.m < cfg.n:
                raise ConfigError(f"need m >= n >= 1, got n={cfg.n}, m={cfg.m}")
        else:
            try:
                checked = validate_matrix(cfg.matrix)
            except ValueError as exc:
                raise ConfigError(f"invalid reward matrix: {exc}") from exc
            cfg = replace(cfg, matrix=checked.probs, n=checked.n, m=checked.m)

        if isinstance(cfg.d_init, str):
            if cfg.d_init != "random":
                raise ConfigError(f'd_init must be a distribution or "random", got {cfg.d_init!r}')
        else:
            if len(cfg.d_init) != cfg.n:
                raise ConfigError(f"d_init has {len(cfg.d_init)} entries, expected n={cfg.n}")
            try:
                PopulationDistribution(tuple(float(x) for x in cfg.d_init))
            except ValueError as exc:
                raise ConfigError(f"invalid d_init: {exc}") from exc
        return cfg

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        coerced = dict(data)
        for key in ("d_init", "matrix"):
            value = coerced.get(key)
            if isinstance(value, list):
                coerced[key] = (
                    tuple(tuple(row) for row in value) if key == "matrix" else tuple(value)
                )
        if isinstance(coerced.get("policies"), list):
            coerced["policies"] = tuple(coerced["policies"])
        return cls(**coerced).validated()

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        return cls.from_dict(data)


def make_policy(name: str, matrix: RewardMatrix, config: ExperimentConfig) -> Policy:
    """Fresh policy instance with thresholds derived from the config."""
    if name == "oracle":
        return Oracle(matrix)
    if name == "greedy_oracle":
        return GreedyOracle(matrix)
    if name == "rec":
        steps = config.explore_steps
        if steps is None:
            steps = default_explore_steps(config.horizon)
        return RandomExploreCommit(matrix.n, matrix.m, steps)
    if name == "be":
        return BalancedExploration(
            matrix.n,
            matrix.m,
            exploration_threshold(config.min_reward_coeff, config.horizon),
            tau_scope=config.be_tau_scope,
        )
    if name == "rbae":
        return RejectionArmElimination(
            matrix.n, matrix.m, exploration_threshold(config.max_rejections_coeff, config.horizon)
        )
    raise ConfigError(f"unknown policy {name!r}")


def random_matrix(n: int, m: int, rng: UniformSource) -> RewardMatrix:
    """Uniform entries rearranged to satisfy the structural constraints.

    Each row's maximum is swapped onto the diagonal, then rows (jointly with
    the first n arm labels, so row maxima stay diagonal) are permuted to make
    the diagonal non-increasing.
    """
    if not 1 <= n <= m:
        raise ValueError(f"need m >= n >= 1, got n={n}, m={m}")
    rows = [[rng.random() for _ in range(m)] for _ in range(n)]
    for i, row in enumerate(rows):
        top = max(range(m), key=row.__getitem__)
        row[i], row[top] = row[top], row[i]
    order = sorted(range(n), key=lambda i: -rows[i][i])
    arranged = [
        [rows[order[i]][order[j]] if j < n else rows[order[i]][j] for j in range(m)]
        for i in range(n)
    ]
    return validate_matrix(arranged)


def random_initial_distribution(n: int, rng: UniformSource) -> PopulationDistribution:
    """Uniform draw from the simplex via sorted uniform spacings."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return PopulationDistribution((1.0,))
    cuts = sorted(rng.random() for _ in range(n - 1))
    edges = [0.0, *cuts, 1.0]
    return PopulationDistribution(tuple(edges[i + 1] - edges[i] for i in range(n)))


def simulate_run(
    matrix: RewardMatrix,
    d_init: PopulationDistribution,
    policy: Policy,
    horizon: int,
    params: EvolutionParams,
    rng: UniformSource,
    full_log: bool = False,
) -> tuple[list[int], list[float], list[StepOutcome] | None]:
    """One replication: the per-step rewards, the pre-step d1 series, and the
    full step log when requested."""
    rewards: list[int] = []
    d1s: list[float] = []
    steps: list[StepOutcome] | None = [] if full_log else None
    d = d_init
    for t in range(1, horizon + 1):
        d1s.append(d.values[0])
        context = sample_context(d, rng)
        arm = policy.choose(context, t, rng)
        reward = sample_reward(matrix, context, arm, rng)
        policy.observe(context, arm, reward, t)
        d = evolve(d, arm, reward, t, params)
        rewards.append(reward)
        if steps is not None:
            steps.append(StepOutcome(t=t, context=context, arm=arm, reward=reward, d_after=d))
    return rewards, d1s, steps


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    matrices: list[RewardMatrix]
    runs: dict[str, list[RunRecord]]
    mean_reward: dict[str, np.ndarray]
    mean_d1: dict[str, np.ndarray]
    regret: dict[str, RegretSeries] = field(default_factory=dict)

    def final_regret(self) -> dict[str, float]:
        return {name: series.final() for name, series in self.regret.items()}


def _matrices_for(config: ExperimentConfig) -> list[RewardMatrix]:
    if not isinstance(config.matrix, str):
        return [RewardMatrix(config.matrix)]
    if config.matrix_refresh_every > 0:
        blocks = math.ceil(config.iterations / config.matrix_refresh_every)
    else:
        blocks = 1
    return [
        random_matrix(config.n, config.m, uniform_stream(config.seed, _MATRIX_STREAM, block, 0))
        for block in range(blocks)
    ]


def run_experiment(config: ExperimentConfig, keep_runs: bool = True) -> ExperimentResult:
    """Run every (policy, replication) pair and aggregate.

    Deterministic for a fixed config: streams are keyed by (policy index,
    replication index), replications are reduced in index order, and the CSV
    writer below emits a canonical byte layout. ``keep_runs=False`` drops
    per-run records after they are folded into the aggregates, which keeps
    memory flat for large sweeps.
    """
    config = config.validated()
    matrices = _matrices_for(config)
    refresh = config.matrix_refresh_every if isinstance(config.matrix, str) else 0
    params = EvolutionParams(delta=config.delta, strict=config.strict_evolution)

    fixed_init = (
        None
        if isinstance(config.d_init, str)
        else PopulationDistribution(tuple(float(x) for x in config.d_init))
    )
    inits: list[PopulationDistribution] = []
    for rep in range(config.iterations):
        if fixed_init is not None:
            inits.append(fixed_init)
        else:
            inits.append(
                random_initial_distribution(
                    config.n, uniform_stream(config.seed, _INIT_STREAM, rep, 0)
                )
            )

    runs: dict[str, list[RunRecord]] = {name: [] for name in config.policies}
    reward_sums: dict[str, np.ndarray] = {}
    d1_sums: dict[str, np.ndarray] = {}
    for policy_index, name in enumerate(config.policies):
        reward_sum = np.zeros(config.horizon, dtype=np.int64)
        d1_sum = np.zeros(config.horizon, dtype=np.float64)
        for rep in range(config.iterations):
            matrix = matrices[rep // refresh] if refresh else matrices[0]
            key = (_RUN_STREAM, policy_index, rep)
            rng = uniform_stream(config.seed, *key)
            policy = make_policy(name, matrix, config)
            rewards, d1s, steps = simulate_run(
                matrix, inits[rep], policy, config.horizon, params, rng, config.full_log
            )
            total = np.cumsum(np.asarray(rewards, dtype=np.int64))
            reward_sum += total
            d1_sum += np.asarray(d1s)
            if keep_runs:
                runs[name].append(
                    RunRecord(
                        policy=name,
                        replication=rep,
                        seed_key=(config.seed, *key),
                        total_reward=total,
                        d1=np.asarray(d1s),
                        steps=steps,
                    )
                )
        reward_sums[name] = reward_sum
        d1_sums[name] = d1_sum

    reps = float(config.iterations)
    mean_reward = {name: reward_sums[name] / reps for name in config.policies}
    mean_d1 = {name: d1_sums[name] / reps for name in config.policies}

    regret: dict[str, RegretSeries] = {}
    if "oracle" in config.policies:
        times = np.arange(1, config.horizon + 1)
        for name in config.policies:
            if name == "oracle":
                continue
            regret[name] = RegretSeries(
                policy=name, times=times, values=mean_reward["oracle"] - mean_reward[name]
            )

    result = ExperimentResult(
        config=config,
        matrices=matrices,
        runs=runs,
        mean_reward=mean_reward,
        mean_d1=mean_d1,
        regret=regret,
    )
    if config.output_path:
        write_csv(config.output_path, result)
        if config.full_log and keep_runs:
            write_steps_csv(_steps_path(config.output_path), result)
    return result


def _format(value: float) -> str:
    return f"{value:.17g}"


def result_rows(result: ExperimentResult) -> Iterable[tuple[int, str, float]]:
    """Canonical (t, series, value) order: regret, d1, reward; policies in
    config order; t ascending within a series."""
    names = result.config.policies
    for name in names:
        if name in result.regret:
            for t, v in enumerate(result.regret[name].values, start=1):
                yield t, f"regret:{name}", float(v)
    for prefix, table in (("d1", result.mean_d1), ("reward", result.mean_reward)):
        for name in names:
            for t, v in enumerate(table[name], start=1):
                yield t, f"{prefix}:{name}", float(v)


def write_rows_csv(path: str, rows: Iterable[tuple[int, str, float]]) -> None:
    """Write `t,series,value` rows: UTF-8, LF endings, 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,series,value\n")
        for t, series, value in rows:
            fh.write(f"{t},{series},{_format(value)}\n")


def write_csv(path: str, result: ExperimentResult) -> None:
    write_rows_csv(path, result_rows(result))


def _steps_path(path: str) -> str:
    return path + ".steps.csv" if not path.endswith(".csv") else path[:-4] + ".steps.csv"


def write_steps_csv(path: str, result: ExperimentResult) -> None:
    """Per-step log (only for runs recorded with full logging)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("policy,replication,t,context,arm,reward,d1_after\n")
        for name in result.config.policies:
            for record in result.runs[name]:
                if record.steps is None:
                    continue
                for s in record.steps:
                    fh.write(
                        f"{name},{record.replication},{s.t},{s.context},{s.arm},"
                        f"{s.reward},{_format(s.d_after.values[0])}\n"
                    )
