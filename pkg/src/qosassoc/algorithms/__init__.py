"""Association algorithms: max-rate, distributed (QoS-aware and user-count) and max-probability."""

from ._result import AlgorithmResult, IterationTrace, OpCounter
from .baseline import max_rate_assoc
from .centralized import capacity_feasible, max_probability, project_weighted_simplex_columns, solve_relaxed
from .distributed import (bs_load_update, bs_multiplier_update, dual_value, qos_distributed,
                          user_choice_qos, ye_distributed, ye_dual_value)

__all__ = [
    "AlgorithmResult", "IterationTrace", "OpCounter", "max_rate_assoc", "max_probability",
    "solve_relaxed", "capacity_feasible", "project_weighted_simplex_columns", "bs_load_update",
    "bs_multiplier_update", "dual_value", "ye_dual_value", "qos_distributed", "user_choice_qos",
    "ye_distributed",
]
