"""Contextual bandits with time-decaying positive externalities.

Simulation engine, five recommendation policies compared by finite-horizon
regret against an oracle baseline, and a mean-field ODE module for the
two-type, two-arm dynamics.
"""

from .analysis import (
    DimensionError,
    MeanFieldComparison,
    MeanFieldTrajectory,
    OdeCoefficients,
    PullProbabilities,
    expected_increment,
    integrate,
    mean_field_comparison,
    ode_coefficients,
    ode_rhs,
)
from .environment import (
    ArmHasNoContext,
    DiagonalNotMaximal,
    EntryOutOfRange,
    EvolutionParams,
    PopulationDistribution,
    RewardMatrix,
    RewardMatrixError,
    RowsUnordered,
    ShapeError,
    StepOutcome,
    evolve,
    sample_context,
    sample_reward,
    validate_matrix,
)
from .harness import (
    POLICY_NAMES,
    ConfigError,
    ExperimentConfig,
    ExperimentResult,
    make_policy,
    random_initial_distribution,
    random_matrix,
    run_experiment,
    simulate_run,
    write_csv,
)
from .metrics import HorizonMismatch, RegretSeries, RunRecord, cumulative_reward, mean_regret
from .policies import (
    BalancedExploration,
    GreedyOracle,
    Oracle,
    Policy,
    PolicyCounters,
    RandomExploreCommit,
    RejectionArmElimination,
    exploration_threshold,
)
from .streams import uniform_stream

__version__ = "0.1.0"
