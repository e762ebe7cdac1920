"""Multi-round ransom decision game.

Victim best responses by backward induction, optimal attacker reputation
via per-case linear programs, seeded population simulations, and a
desk-scale simulator of the verifiable-encryption escrow protocol.
"""

from .core import (
    CIRCULAR,
    CUSTOM,
    LINEAR,
    PAY_ALL,
    QUADRATIC,
    DecayProfile,
    GameInstance,
    InvalidInstanceError,
    Reputation,
    VictimPolicy,
    build_profiles,
    instance_from_json,
    instance_to_json,
    make_instance,
    validate_instance,
)
from .strategy import (
    attacker_expected_profit,
    closed_form_profit,
    continuation_policy,
    decide_single_round,
    enumerate_best_response,
    pay_branch_value,
    perfect_reputation_policy,
    profit_formula_divergence,
    victim_expected_loss,
    victim_policy,
    worst_case_equilibrium,
)
from .lp import LinearProgram, LpSolution, solve_lp
from .reputation import (
    build_lp,
    grid_search_reputation,
    lp_crosscheck_report,
    optimal_reputation,
    overcharge_bound,
    recover_reputation,
    single_round_optimum,
)
from .montecarlo import (
    ScenarioConfig,
    ScenarioResult,
    compare_scenarios,
    expected_profit_sweep,
    reputation_sweep,
    run_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "PAY_ALL", "QUADRATIC", "LINEAR", "CIRCULAR", "CUSTOM",
    "DecayProfile", "GameInstance", "Reputation", "VictimPolicy",
    "InvalidInstanceError", "build_profiles", "make_instance",
    "validate_instance", "instance_from_json", "instance_to_json",
    "victim_policy", "perfect_reputation_policy", "continuation_policy",
    "pay_branch_value", "decide_single_round", "enumerate_best_response",
    "attacker_expected_profit", "victim_expected_loss",
    "worst_case_equilibrium", "closed_form_profit",
    "profit_formula_divergence",
    "LinearProgram", "LpSolution", "solve_lp",
    "build_lp", "recover_reputation", "optimal_reputation",
    "grid_search_reputation", "overcharge_bound", "single_round_optimum",
    "lp_crosscheck_report",
    "ScenarioConfig", "ScenarioResult", "run_scenario", "compare_scenarios",
    "reputation_sweep", "expected_profit_sweep",
]
