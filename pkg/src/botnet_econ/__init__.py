"""Botnet rental-market economics: rewards, break-even and max-min analysis, defense Monte Carlo."""

__version__ = "0.1.0"

from .analysis import (
    BreakEvenResult,
    SaddleResult,
    SearchSpec,
    breakeven_success_prob,
    breakeven_usagefee,
    constant_traffic_saddle_value,
    maxmin_attacker,
    min_attackers,
    minmax_attacker,
    rent_bound_slack,
    rent_ratio,
)
from .defense import (
    AdaptivePolicy,
    Buffering,
    DefenseConfig,
    PayoutSplit,
    VirtualAttacker,
    apply_virtual_attacker,
    buffer_traffic,
    load_defense,
)
from .errors import ConstraintError, DegenerateAnalysisError, ScenarioError
from .rewards import RewardReport, reward_attacker, reward_customer, reward_report, reward_target
from .scenario import (
    DurationLaw,
    IntrusionCostMode,
    LearningCurve,
    MarkovSpec,
    RentMatrix,
    Scenario,
    TargetCostMode,
    TrafficProfile,
)
from .schedule import AttackSchedule, Slot, build_markov_schedule, build_uniform_schedule, schedule_for
from .serialization import builtin_scenario, load_scenario, save_scenario, scenario_hash
from .simulation import SimulationSummary, evaluate_defense, run_monte_carlo, simulate_trials
