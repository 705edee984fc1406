"""Fixed-confidence pure exploration for combinatorial bandits with
semi-bandit feedback.

The sampling rule is a zero-sum game between a no-regret learner over the
action polytope and an adversary playing closed-form Gaussian best responses;
identification stops when a likelihood-ratio statistic clears a confidence
threshold.
"""

from .bandit import BanditInstance, ConfidenceBox, EstimatorState, kl_gaussian, sample_feedback, update_estimator
from .batch import BatchSummary, emit_csv, emit_run_trace, run_batch
from .complexity import ComplexityResult, compute_complexity, lower_bound
from .engine import GameConfig, RunResult, best_response_gaussian, glr_statistic, run_combgame
from .learners import doubling_schedule, make_learner
from .scenarios import (
    Scenario,
    make_scenario,
    scenario_almost_all_sets,
    scenario_grid_network,
    scenario_line_network,
    scenario_uniform_matroid,
)
from .structures import ActionSpace, AnswerSpace, PolytopeParams, incidence, polytope_params
from .thresholds import exploration_bonus, lambert_wbar, stopping_threshold

__version__ = "0.1.0"

__all__ = [
    "BanditInstance",
    "EstimatorState",
    "ConfidenceBox",
    "kl_gaussian",
    "sample_feedback",
    "update_estimator",
    "ActionSpace",
    "AnswerSpace",
    "PolytopeParams",
    "incidence",
    "polytope_params",
    "doubling_schedule",
    "make_learner",
    "GameConfig",
    "RunResult",
    "run_combgame",
    "best_response_gaussian",
    "glr_statistic",
    "exploration_bonus",
    "lambert_wbar",
    "stopping_threshold",
    "ComplexityResult",
    "compute_complexity",
    "lower_bound",
    "Scenario",
    "make_scenario",
    "scenario_uniform_matroid",
    "scenario_grid_network",
    "scenario_line_network",
    "scenario_almost_all_sets",
    "BatchSummary",
    "run_batch",
    "emit_csv",
    "emit_run_trace",
]
