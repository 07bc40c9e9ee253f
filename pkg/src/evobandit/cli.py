"""Command-line front end: run experiments, check the mean-field ODE,
validate configs and matrices.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .analysis import PullProbabilities, mean_field_comparison
from .environment import RewardMatrixError, validate_matrix
from .harness import (
    POLICY_NAMES,
    ConfigError,
    ExperimentConfig,
    run_experiment,
    write_rows_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _add_common_overrides(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override its keys")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--horizon", type=int, help="steps per replication")
    parser.add_argument("--iterations", type=int, help="replication count")
    parser.add_argument("--delta", type=float, help="externality step size")
    parser.add_argument("--out", help="output CSV path")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evobandit",
        description="Contextual bandit simulations with decaying positive externalities",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a full experiment and write the aggregate CSV")
    _add_common_overrides(run)
    run.add_argument(
        "--policies",
        help=f"comma-separated subset of {','.join(POLICY_NAMES)}",
    )
    run.add_argument("--matrix", help='reward matrix as JSON, e.g. "[[0.8,0.4],[0.2,0.7]]"')
    run.add_argument("--d-init", help='initial distribution as JSON list, or "random"')
    run.add_argument(
        "--matrix-refresh-every",
        type=int,
        help="replications between fresh random matrices (0 = never)",
    )
    run.add_argument("--full-log", action="store_true", help="also write a per-step log CSV")

    ode = sub.add_parser("odecheck", help="compare Monte Carlo mean d1(t) with the ODE solution")
    _add_common_overrides(ode)
    ode.add_argument(
        "--pulls",
        default="identity",
        choices=["identity", "uniform", "arm1", "arm2"],
        help="stationary pull probabilities to analyse",
    )
    ode.add_argument("--matrix", help="2x2 reward matrix as JSON")
    ode.add_argument("--runs", type=int, default=2000, help="number of Monte Carlo runs")
    ode.add_argument("--d1", type=float, default=0.5, help="initial share of the first type")

    val = sub.add_parser("validate", help="validate a config file or a reward matrix")
    val.add_argument("--config", help="JSON config file to validate")
    val.add_argument("--matrix", help="reward matrix as JSON to validate")
    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    config = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    overrides = {}
    for flag, key in (
        ("seed", "seed"),
        ("horizon", "horizon"),
        ("iterations", "iterations"),
        ("delta", "delta"),
        ("out", "output_path"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, "policies", None):
        overrides["policies"] = tuple(p.strip() for p in args.policies.split(",") if p.strip())
    if getattr(args, "matrix", None):
        overrides["matrix"] = _parse_matrix_arg(args.matrix)
    if getattr(args, "d_init", None):
        raw = args.d_init
        overrides["d_init"] = "random" if raw == "random" else tuple(_parse_json_list(raw))
    if getattr(args, "matrix_refresh_every", None) is not None:
        overrides["matrix_refresh_every"] = args.matrix_refresh_every
    if getattr(args, "full_log", False):
        overrides["full_log"] = True
    return replace(config, **overrides).validated()


def _parse_json_list(raw: str) -> list:
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"not valid JSON: {raw!r} ({exc})") from exc
    if not isinstance(data, list):
        raise ConfigError(f"expected a JSON list, got {raw!r}")
    return data


def _parse_matrix_arg(raw: str):
    if raw == "random":
        return "random"
    grid = _parse_json_list(raw)
    return tuple(tuple(row) for row in grid)


_PULL_CHOICES = {
    "identity": PullProbabilities.identity,
    "uniform": PullProbabilities.uniform,
    "arm1": lambda: PullProbabilities.fixed_arm(1),
    "arm2": lambda: PullProbabilities.fixed_arm(2),
}


def _cmd_run(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    result = run_experiment(config)
    if config.output_path:
        print(f"wrote {config.output_path}")
    for name, value in result.final_regret().items():
        print(f"final regret {name}: {value:.3f}")
    return EXIT_OK


def _cmd_odecheck(args: argparse.Namespace) -> int:
    base = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    matrix_raw = _parse_matrix_arg(args.matrix) if args.matrix else base.matrix
    if matrix_raw == "random":
        matrix_raw = ((0.8, 0.4), (0.2, 0.7))
    try:
        matrix = validate_matrix(matrix_raw)
    except RewardMatrixError as exc:
        raise ConfigError(f"invalid reward matrix: {exc}") from exc
    delta = args.delta if args.delta is not None else base.delta
    horizon = args.horizon if args.horizon is not None else base.horizon
    seed = args.seed if args.seed is not None else base.seed
    if not 0.0 <= args.d1 <= 1.0:
        raise ConfigError("--d1 must lie in [0, 1]")
    comparison = mean_field_comparison(
        matrix=matrix,
        pulls=_PULL_CHOICES[args.pulls](),
        delta=delta,
        d1_init=args.d1,
        horizon=horizon,
        num_runs=args.runs,
        seed=seed,
    )
    if args.out:
        write_rows_csv(args.out, comparison.rows())
        print(f"wrote {args.out}")
    print(f"sup-norm gap over {args.runs} runs: {comparison.gap:.6f}")
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    if not args.config and not args.matrix:
        raise ConfigError("validate needs --config and/or --matrix")
    if args.config:
        ExperimentConfig.from_file(args.config)
        print(f"config ok: {args.config}")
    if args.matrix:
        raw = _parse_matrix_arg(args.matrix)
        if raw == "random":
            raise ConfigError("--matrix random has nothing to validate")
        try:
            matrix = validate_matrix(raw)
        except RewardMatrixError as exc:
            raise ConfigError(f"invalid reward matrix: {exc}") from exc
        print(f"matrix ok: {matrix.n}x{matrix.m}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler = {"run": _cmd_run, "odecheck": _cmd_odecheck, "validate": _cmd_validate}[args.command]
    try:
        return handler(args)
    except (ConfigError, RewardMatrixError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
