"""Energy-optimal task assignment for D2D-connected device crowds.

Mobile devices within radio range of each other can execute tasks locally,
offload them to idle neighbors, or exchange them pairwise.  This package
models the energy of each choice, reduces the round-wide assignment
problem to minimum-weight perfect matching, solves it exactly with a
dual-certified blossom solver, and benchmarks the result against greedy,
reciprocal, and random baselines over randomized multi-round scenarios,
optionally under a resource tit-for-tat incentive policy.
"""

__version__ = "0.1.0"

from .model import (
    HYBRID,
    PURE_CELLULAR,
    PURE_CPU,
    TASK_KINDS,
    CapacityExhaustedError,
    DeviceProfile,
    EnergyBreakdown,
    RateError,
    Task,
    local_energy,
    offload_energy,
)
from .matching import (
    CertificateError,
    Matching,
    MatchingInfeasibleError,
    WeightedGraph,
    brute_force_min_matching,
    min_weight_perfect_matching,
    verify_certificate,
)
from .scenario import (
    ConnectivityGraph,
    Round,
    ScenarioConfig,
    build_connectivity,
    d2d_rate,
    generate_devices,
    generate_round,
    generate_tasks,
    step_mobility,
    with_device_count,
)
from .matchgraph import (
    Assignment,
    CoverageError,
    InconsistentRoundError,
    MatchingGraph,
    MatchNode,
    build,
    decode,
    validate_assignment,
)
from .schemes import (
    SCHEMES,
    all_local_assignment,
    all_local_energy,
    assign_greedy,
    assign_optimal,
    assign_random,
    assign_reciprocal,
    brute_force_assignment,
    saving_ratio,
    total_energy,
)
from .incentive import (
    CreditLedger,
    TitForTatParams,
    default_params,
    eligible,
    filter_round,
    mean_task_demand,
    record,
)
from .simkit import (
    ExperimentConfig,
    ExperimentSummary,
    RoundResult,
    SchemeStats,
    round_hash,
    run_experiment,
    sweep,
    write_outputs,
    write_sweep_outputs,
)

__all__ = [
    "__version__",
    # model
    "PURE_CPU", "PURE_CELLULAR", "HYBRID", "TASK_KINDS",
    "DeviceProfile", "Task", "EnergyBreakdown",
    "CapacityExhaustedError", "RateError",
    "local_energy", "offload_energy",
    # matching
    "WeightedGraph", "Matching", "MatchingInfeasibleError", "CertificateError",
    "min_weight_perfect_matching", "brute_force_min_matching", "verify_certificate",
    # scenario
    "ScenarioConfig", "ConnectivityGraph", "Round",
    "d2d_rate", "generate_devices", "build_connectivity", "generate_tasks",
    "step_mobility", "generate_round", "with_device_count",
    # matchgraph
    "MatchNode", "MatchingGraph", "Assignment",
    "InconsistentRoundError", "CoverageError",
    "build", "decode", "validate_assignment",
    # schemes
    "SCHEMES", "assign_optimal", "assign_greedy", "assign_reciprocal",
    "assign_random", "brute_force_assignment", "all_local_assignment",
    "all_local_energy", "total_energy", "saving_ratio",
    # incentive
    "TitForTatParams", "CreditLedger", "mean_task_demand", "default_params",
    "eligible", "record", "filter_round",
    # simkit
    "ExperimentConfig", "RoundResult", "SchemeStats", "ExperimentSummary",
    "round_hash", "run_experiment", "sweep", "write_outputs", "write_sweep_outputs",
]
