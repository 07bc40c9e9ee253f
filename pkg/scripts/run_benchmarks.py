#!/usr/bin/env python3
"""Run the standard benchmark experiments and write their CSVs.

Four regret/d1 experiments (two fixed matrices from a balanced start, one
skewed start, one with random starts) plus a mean-field ODE cross-check.
Each CSV feeds the plotting frontend; see README for the schema.
"""

import argparse
import pathlib
import sys
import time

from evobandit import ExperimentConfig, run_experiment
from evobandit.analysis import PullProbabilities, mean_field_comparison
from evobandit.environment import validate_matrix
from evobandit.harness import write_rows_csv

SEPARATED = ((0.8, 0.4), (0.2, 0.7))  # clear gap between best and runner-up arms
HIGH_REWARD = ((0.9, 0.6), (0.5, 0.8))  # every arm succeeds often

EXPERIMENTS = {
    "separated_balanced_start": dict(matrix=SEPARATED, d_init=(0.5, 0.5)),
    "high_reward_balanced_start": dict(matrix=HIGH_REWARD, d_init=(0.5, 0.5)),
    "separated_skewed_start": dict(matrix=SEPARATED, d_init=(0.1, 0.9)),
    "separated_random_start": dict(matrix=SEPARATED, d_init="random"),
    "random_matrix_refresh": dict(matrix="random", d_init=(0.5, 0.5),
                                  matrix_refresh_every=50, iterations=1250),
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="results", help="directory for CSV output")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--iterations", type=int, default=500)
    parser.add_argument("--horizon", type=int, default=5000)
    parser.add_argument("--only", nargs="*", choices=sorted(EXPERIMENTS), default=None)
    args = parser.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    names = args.only or list(EXPERIMENTS)
    for name in names:
        overrides = dict(EXPERIMENTS[name])
        overrides.setdefault("iterations", args.iterations)
        cfg = ExperimentConfig(
            horizon=args.horizon,
            delta=0.01,
            seed=args.seed,
            output_path=str(outdir / f"{name}.csv"),
            **overrides,
        )
        start = time.perf_counter()
        result = run_experiment(cfg, keep_runs=False)
        finals = ", ".join(f"{k}={v:.1f}" for k, v in result.final_regret().items())
        print(f"{name}: {time.perf_counter() - start:.0f}s  final regret: {finals}")

    comparison = mean_field_comparison(
        matrix=validate_matrix(SEPARATED),
        pulls=PullProbabilities.identity(),
        delta=0.01,
        d1_init=0.5,
        horizon=args.horizon,
        num_runs=2000,
        seed=args.seed,
    )
    path = outdir / "mean_field_check.csv"
    write_rows_csv(str(path), comparison.rows())
    print(f"mean_field_check: sup-norm gap {comparison.gap:.5f} -> {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
