import numpy as np

from ..core import Association, as_rate_array, objective_user_based
from ._result import AlgorithmResult, IterationTrace


def max_rate_assoc(rates) -> AlgorithmResult:
    """Every user joins the BS with the highest achievable rate (lowest index on ties)."""
    R = as_rate_array(rates)
    assoc = Association.from_labels(np.argmax(R, axis=0), R.shape[0])
    obj = objective_user_based(assoc, R)
    trace = [IterationTrace(iteration=0, dual_value=float("nan"), primal_objective=obj,
                            utility=obj, demand=assoc.user_loads())]
    return AlgorithmResult(association=assoc, trace=trace, converged=True, n_iter=1)
