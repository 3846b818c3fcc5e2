"""Online simple knapsack with reservation costs: policies, adversaries and an exact harness."""

from .adversaries import (
    DuelResult,
    chain_adversary,
    duel,
    enumerate_strategies,
    four_item_adversary,
    make_adversary,
    min_expression,
    nonrejecting_adversary,
)
from .algorithms import (
    alpha0,
    alpha4,
    classify_item,
    make_policy,
    make_policy_alg1,
    make_policy_threshold,
    rho_star,
    select_policy,
)
from .enclosure import RatioValue
from .harness import (
    RatioRecord,
    SweepSpec,
    emit_curve,
    measure_ratio,
    random_instance,
    sorted_prefix_check,
    sweep,
    verify_lemmas,
)
from .model import (
    Finalize,
    Instance,
    Outcome,
    RunState,
    Trace,
    apply_action,
    final_gain,
    run_on_instance,
    validate_instance,
)
from .oracle import brute_force_popt, opt_gain, popt

__all__ = [
    "DuelResult", "Finalize", "Instance", "Outcome", "RatioRecord", "RatioValue", "RunState",
    "SweepSpec", "Trace", "alpha0", "alpha4", "apply_action", "brute_force_popt", "chain_adversary",
    "classify_item", "duel", "emit_curve", "enumerate_strategies", "final_gain", "four_item_adversary",
    "make_adversary", "make_policy", "make_policy_alg1", "make_policy_threshold", "measure_ratio",
    "min_expression", "nonrejecting_adversary", "opt_gain", "popt", "random_instance", "rho_star",
    "run_on_instance", "select_policy", "sorted_prefix_check", "sweep", "validate_instance",
    "verify_lemmas",
]
