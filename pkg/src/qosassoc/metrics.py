"""Blocking probability and Jain load-balancing indices."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .channel import MACRO
from .exceptions import DomainError
from .scheduling import ScheduleOutcome


@dataclass(frozen=True)
class MetricSet:
    blocking: float
    jain_overall: float
    jain_macro: float
    total_utility: float
    served_count: int

    def to_dict(self) -> dict:
        return asdict(self)


def call_blocking(outcome: ScheduleOutcome, K: int) -> float:
    """Fraction of the ``K`` users that no BS admitted."""
    if K < 1:
        raise DomainError("K must be >= 1")
    return 1.0 - outcome.n_served / K


def jain_index(loads) -> float:
    """``(sum rho)^2 / (N sum rho^2)``; NaN when every load is zero."""
    rho = np.asarray(loads, dtype=float).reshape(-1)
    if rho.size == 0:
        raise DomainError("jain_index needs at least one cell")
    if np.any(rho < 0):
        raise DomainError("loads must be nonnegative")
    # normalise first so tiny or huge loads do not under/overflow the squares
    top = rho.max()
    if top == 0:
        return float("nan")
    r = rho / top
    return float(r.sum() ** 2 / (rho.size * np.dot(r, r)))


def jain_macro(outcome: ScheduleOutcome, topology) -> float:
    """Jain index over the macro BSs only."""
    return jain_index(outcome.consumed[topology.bs_tier == MACRO])


def compute_metrics(outcome: ScheduleOutcome, topology, total_utility: float) -> MetricSet:
    return MetricSet(
        blocking=call_blocking(outcome, topology.n_users),
        jain_overall=jain_index(outcome.consumed),
        jain_macro=jain_macro(outcome, topology),
        total_utility=float(total_utility),
        served_count=outcome.n_served,
    )
