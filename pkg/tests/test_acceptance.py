"""Acceptance suite: one test per top-level criterion, at the reference
experiment scale (T=5000, 500 replications, delta=0.01, tau=70,
reward/rejection thresholds 26). Each test prints a PASS/FAIL line with the
measured quantities; run with `pytest tests/test_acceptance.py -v -s`.
"""

import math
import random

import numpy as np
import pytest

from evobandit.analysis import (
    PullProbabilities,
    expected_increment,
    integrate,
    mean_field_comparison,
    ode_coefficients,
    ode_rhs,
    OdeCoefficients,
)
from evobandit.environment import (
    EvolutionParams,
    PopulationDistribution,
    evolve,
    validate_matrix,
)
from evobandit.harness import ExperimentConfig, run_experiment
from evobandit.policies import (
    BalancedExploration,
    GreedyOracle,
    Oracle,
    RandomExploreCommit,
    RejectionArmElimination,
)

SEPARATED = ((0.8, 0.4), (0.2, 0.7))
HIGH_REWARD = ((0.9, 0.6), (0.5, 0.8))
PROTOCOL = dict(horizon=5000, iterations=500, delta=0.01, seed=0)


def report(name: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, f"{name}: {detail}"


def run_protocol(matrix, d_init):
    cfg = ExperimentConfig(matrix=matrix, d_init=d_init, **PROTOCOL)
    return run_experiment(cfg, keep_runs=False)


@pytest.fixture(scope="module")
def separated_balanced():
    return run_protocol(SEPARATED, (0.5, 0.5))


@pytest.fixture(scope="module")
def high_reward_balanced():
    return run_protocol(HIGH_REWARD, (0.5, 0.5))


@pytest.fixture(scope="module")
def separated_skewed():
    return run_protocol(SEPARATED, (0.1, 0.9))


@pytest.fixture(scope="module")
def separated_random_start():
    return run_protocol(SEPARATED, "random")


def test_regret_ordering_separated_matrix(separated_balanced):
    finals = separated_balanced.final_regret()
    ok = finals["rbae"] < finals["rec"] < finals["be"]
    report(
        "regret ordering, separated matrix (rbae < rec < be)",
        ok,
        f"rbae={finals['rbae']:.1f} rec={finals['rec']:.1f} be={finals['be']:.1f}",
    )


def test_regret_ordering_high_reward_matrix(high_reward_balanced):
    finals = high_reward_balanced.final_regret()
    ok = finals["be"] < finals["rec"] and finals["rbae"] < finals["rec"]
    report(
        "regret ordering, high-reward matrix (be < rec and rbae < rec)",
        ok,
        f"be={finals['be']:.1f} rbae={finals['rbae']:.1f} rec={finals['rec']:.1f}",
    )


def test_oracle_final_share_dominates(separated_balanced, high_reward_balanced):
    for label, result in (
        ("separated", separated_balanced),
        ("high-reward", high_reward_balanced),
    ):
        finals = {name: float(curve[-1]) for name, curve in result.mean_d1.items()}
        others = {k: v for k, v in finals.items() if k != "oracle"}
        ok = all(finals["oracle"] > v for v in others.values())
        report(
            f"oracle drives d1 highest ({label})",
            ok,
            f"oracle={finals['oracle']:.3f} max(other)={max(others.values()):.3f}",
        )


def test_regret_ordering_skewed_and_random_starts(separated_skewed, separated_random_start):
    for label, result in (
        ("skewed start [0.1,0.9]", separated_skewed),
        ("random starts", separated_random_start),
    ):
        finals = result.final_regret()
        ok = finals["rbae"] < finals["be"] and finals["rbae"] < finals["rec"]
        report(
            f"rbae beats be and rec ({label})",
            ok,
            f"rbae={finals['rbae']:.1f} be={finals['be']:.1f} rec={finals['rec']:.1f}",
        )


def test_discrete_increment_equals_ode_rhs():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(10**5):
        hi, lo = np.sort(rng.random(2))[::-1]
        grid = ((hi, rng.random() * hi), (rng.random() * lo, lo))
        matrix = validate_matrix(grid)
        pulls = PullProbabilities(
            tuple(
                (p, 1.0 - p) for p in (float(rng.random()), float(rng.random()))
            )
        )
        d1 = float(rng.random())
        t = 1.0 + 999.0 * float(rng.random())
        delta = 10.0 ** float(rng.uniform(-3, 1))
        lhs = expected_increment(d1, t, matrix, pulls, delta)
        rhs = ode_rhs(d1, t, ode_coefficients(matrix, pulls, delta))
        worst = max(worst, abs(lhs - rhs))
    report(
        "discrete expected increment == ode rhs on 1e5 random inputs",
        worst <= 1e-12,
        f"max |difference| = {worst:.3e}",
    )


def test_mean_field_trajectory_matches_simulation():
    comparison = mean_field_comparison(
        matrix=validate_matrix(SEPARATED),
        pulls=PullProbabilities.identity(),
        delta=0.01,
        d1_init=0.5,
        horizon=5000,
        num_runs=2000,
        seed=0,
    )
    report(
        "mean-field ODE tracks 2000-run simulation (sup gap < 0.02)",
        comparison.gap < 0.02,
        f"sup-norm gap = {comparison.gap:.5f}",
    )


def test_rk4_fourth_order_convergence():
    def exact(t, t0, d0, b, delta):
        ramp = lambda t: 2.0 * delta * (math.sqrt(t) - delta * math.log(delta + math.sqrt(t)))
        z = math.log(d0 / (1.0 - d0)) + b * (ramp(t) - ramp(t0))
        return 1.0 / (1.0 + math.exp(-z))

    coeffs = OdeCoefficients(a=0.0, b=0.8, c=0.0, delta=5.0)
    reference = exact(9.0, 1.0, 0.3, 0.8, 5.0)
    steps = [1.0, 0.5, 0.25, 0.125]
    errors = [abs(integrate(coeffs, 0.3, 1.0, 9.0, h).final() - reference) for h in steps]
    slope = float(np.polyfit(np.log(steps), np.log(errors), 1)[0])
    report(
        "RK4 global error scales as h^4 (slope 4 +/- 0.2)",
        abs(slope - 4.0) <= 0.2,
        f"log-log slope = {slope:.3f}",
    )


def test_invariant_simplex_preservation():
    rng = random.Random(71)
    worst = 0.0
    for _ in range(20000):
        n = rng.randint(1, 5)
        cuts = sorted(rng.random() for _ in range(n - 1))
        edges = [0.0, *cuts, 1.0]
        d = PopulationDistribution(tuple(edges[i + 1] - edges[i] for i in range(n)))
        params = EvolutionParams(delta=10.0 ** rng.uniform(-4, 1))
        out = evolve(d, rng.randint(1, n), rng.randint(0, 1), rng.randint(1, 10**6), params)
        assert all(v >= 0.0 for v in out.values)
        worst = max(worst, abs(sum(out.values) - 1.0))
    report(
        "evolve preserves the simplex (20k random updates, tol 1e-12)",
        worst < 1e-12,
        f"max |sum - 1| = {worst:.2e}",
    )


def _drive(policy, steps, seed, matrix):
    """Feed a policy `steps` steps of matrix-sampled outcomes."""
    rng = random.Random(seed)
    for t in range(1, steps + 1):
        ctx = rng.randint(1, policy.n)
        arm = policy.choose(ctx, t, rng)
        r = 1 if rng.random() < matrix.prob(ctx, arm) else 0
        policy.observe(ctx, arm, r, t)


def test_invariant_counter_identity():
    matrix = validate_matrix(SEPARATED)
    makers = {
        "oracle": lambda: Oracle(matrix),
        "greedy_oracle": lambda: GreedyOracle(matrix),
        "rec": lambda: RandomExploreCommit(2, 2, 40),
        "be": lambda: BalancedExploration(2, 2, 8),
        "be_global": lambda: BalancedExploration(2, 2, 8, tau_scope="global"),
        "rbae": lambda: RejectionArmElimination(2, 2, 8),
    }
    ok = True
    for name, make in makers.items():
        for seed in range(20):
            policy = make()
            rng = random.Random(seed)
            for t in range(1, 301):
                ctx = rng.randint(1, 2)
                arm = policy.choose(ctx, t, rng)
                policy.observe(ctx, arm, rng.randint(0, 1), t)
                c = policy.counters
                ok = ok and all(
                    c.pulls[i][j] == c.rewards[i][j] + c.rejections[i][j]
                    for i in range(2)
                    for j in range(2)
                )
            ok = ok and policy.counters.total_pulls() == 300
    report("pull counts equal rewards + rejections for every policy", ok, "120 driven runs")


def test_invariant_rbae_active_sets():
    matrix = validate_matrix(SEPARATED)
    ok = True
    for seed in range(30):
        policy = RejectionArmElimination(2, 2, max_rejections=5)
        rng = random.Random(1000 + seed)
        previous = [set(a) for a in policy.active]
        for t in range(1, 2001):
            ctx = rng.randint(1, 2)
            arm = policy.choose(ctx, t, rng)
            r = 1 if rng.random() < matrix.prob(ctx, arm) else 0
            policy.observe(ctx, arm, r, t)
            current = [set(a) for a in policy.active]
            ok = ok and all(c <= p and c for c, p in zip(current, previous))
            previous = current
    report("rbae active sets only shrink and never empty", ok, "30 runs x 2000 steps")


def test_invariant_rec_commitment_stable():
    matrix = validate_matrix(SEPARATED)
    ok = True
    for seed in range(30):
        policy = RandomExploreCommit(2, 2, explore_steps=50)
        _drive(policy, 50, 3000 + seed, matrix)
        rng = random.Random(seed)
        first = {i: policy.choose(i, 51, rng) for i in (1, 2)}
        for t in range(52, 500):
            for i in (1, 2):
                ok = ok and policy.choose(i, t, rng) == first[i]
    report("rec choice per context constant after commitment", ok, "30 runs, t in (tau, 500)")


def test_invariant_be_exploits_only_after_threshold():
    matrix = validate_matrix(SEPARATED)
    ok = True
    for scope in ("context", "global"):
        for seed in range(20):
            policy = BalancedExploration(2, 2, min_reward=6, tau_scope=scope)
            rng = random.Random(4000 + seed)
            for t in range(1, 1001):
                ctx = rng.randint(1, 2)
                row = list(policy.counters.rewards[ctx - 1])
                arm = policy.choose(ctx, t, rng)
                if min(row) < policy.min_reward:
                    ok = ok and arm == min(range(2), key=row.__getitem__) + 1
                else:
                    snap = policy.pull_snapshot[ctx - 1]
                    ok = ok and arm == min(range(2), key=snap.__getitem__) + 1
                r = 1 if rng.random() < matrix.prob(ctx, arm) else 0
                policy.observe(ctx, arm, r, t)
    report("be exploit branch gated on min rewards >= threshold", ok, "both tau scopes")


def test_end_to_end_determinism(tmp_path):
    paths = []
    for tag in ("x", "y"):
        out = tmp_path / f"{tag}.csv"
        cfg = ExperimentConfig(
            matrix=SEPARATED, d_init=(0.5, 0.5), horizon=400, iterations=20,
            delta=0.01, seed=9, output_path=str(out),
        )
        run_experiment(cfg, keep_runs=False)
        paths.append(out.read_bytes())
    ok = paths[0] == paths[1]
    report("same seed and config produce byte-identical CSV", ok, f"{len(paths[0])} bytes")
