"""Simulation laboratory for repeated two-player demand-splitting games.

Lookahead planners with tunable reward weights play against rule-based or
learned opponent models over many rounds; a benchmark suite sweeps the
weights over a grid and tabulates profits and agreement rates.
"""

from .core import (
    GameConfig,
    GameLog,
    JointState,
    Role,
    RoundRecord,
    chi,
    profit,
    reward,
    reward_matrix,
    seat_view,
)
from .engine import HeuristicAgent, RngPlan, pretrain, run_game, success_rate
from .experiments import (
    AgentSpec,
    CellResult,
    ExperimentSpec,
    SweepSummary,
    aggregate,
    benchmark_spec,
    run_test,
)
from .opponent import (
    DirichletLearner,
    HeuristicModel,
    heuristic_distribution,
    heuristic_sample,
    heuristic_table,
    load_learner,
    make_prior,
    save_learner,
    uniform_model,
    uniform_table,
)
from .planner import (
    DecisionRule,
    MdpAgent,
    ValueTable,
    backward_induction,
    brute_force_value,
)

__version__ = "0.1.0"

__all__ = [
    "GameConfig",
    "GameLog",
    "JointState",
    "Role",
    "RoundRecord",
    "chi",
    "profit",
    "reward",
    "reward_matrix",
    "seat_view",
    "HeuristicAgent",
    "RngPlan",
    "pretrain",
    "run_game",
    "success_rate",
    "AgentSpec",
    "CellResult",
    "ExperimentSpec",
    "SweepSummary",
    "aggregate",
    "benchmark_spec",
    "run_test",
    "DirichletLearner",
    "HeuristicModel",
    "heuristic_distribution",
    "heuristic_sample",
    "heuristic_table",
    "load_learner",
    "make_prior",
    "save_learner",
    "uniform_model",
    "uniform_table",
    "DecisionRule",
    "MdpAgent",
    "ValueTable",
    "backward_induction",
    "brute_force_value",
    "__version__",
]
