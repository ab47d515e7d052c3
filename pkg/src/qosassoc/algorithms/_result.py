from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..core import Association


@dataclass
class IterationTrace:
    """Snapshot of one solver iteration.

    ``utility`` is the quantity a convergence plot shows: the dual value for
    the price-based solvers, the relaxed objective for the centralized one.
    """

    iteration: int
    dual_value: float
    primal_objective: float
    utility: float
    supply: Optional[np.ndarray] = None
    demand: Optional[np.ndarray] = None
    mu: Optional[np.ndarray] = None
    feasible: bool = True


@dataclass
class OpCounter:
    """Work done by the per-agent (non-vectorized) distributed protocol."""

    user_candidates: list = field(default_factory=list)
    bs_user_reads: list = field(default_factory=list)


@dataclass
class AlgorithmResult:
    association: Association
    trace: list
    converged: bool
    n_iter: int
    mu: Optional[np.ndarray] = None
    relaxed: Optional[Association] = None
    relaxed_objective: float = float("nan")
    capacity_enforced: bool = True
    ops: Optional[OpCounter] = None

    @property
    def labels(self) -> np.ndarray:
        return self.association.labels

    def utilities(self) -> np.ndarray:
        return np.array([t.utility for t in self.trace])

    def dual_values(self) -> np.ndarray:
        return np.array([t.dual_value for t in self.trace])
