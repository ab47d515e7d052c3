"""Exhaustive integral optima for tiny instances.

Every one of the ``N**K`` assignments is scored with a vectorised formula
written independently of :mod:`qosassoc.core`; the winner is then re-scored
with the core objective so the reported value matches it exactly. Ties go
to the lowest assignment index, where assignment ``i`` gives user ``k`` the
``k``-th base-``N`` digit of ``i`` (user 0 most significant).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .core import (Association, Budget, DemandProfile, as_rate_array, objective_resource_based,
                   objective_user_based, objective_user_pf, resource_demand)
from .exceptions import DomainError, InstanceTooLargeError

MAX_ASSIGNMENTS = 65536
MAX_BS, MAX_USERS = 4, 8


@dataclass(frozen=True)
class TinyInstance:
    rates: np.ndarray
    demand: DemandProfile
    M: float = 100.0

    def __post_init__(self):
        R = as_rate_array(self.rates)
        object.__setattr__(self, "rates", R)
        if isinstance(self.M, Budget):
            object.__setattr__(self, "M", float(self.M.M))
        N, K = R.shape
        if self.demand.s.shape != (N, K):
            raise DomainError("demand does not match the rate matrix")
        if N > MAX_BS or K > MAX_USERS or N ** K > MAX_ASSIGNMENTS:
            raise InstanceTooLargeError(
                f"{N} BSs x {K} users exceeds the enumeration bound ({MAX_BS}x{MAX_USERS}, "
                f"{MAX_ASSIGNMENTS} assignments)")

    @property
    def shape(self):
        return self.rates.shape

    @classmethod
    def random(cls, rng, n_bs: int = 3, n_users: int = 6, M: float = 100.0,
               rate_range=(10.0, 2000.0), max_demand: float = 2000.0) -> "TinyInstance":
        """Log-uniform rates and uniform ``(0, max_demand]`` practical rates."""
        lo, hi = np.log(rate_range[0]), np.log(rate_range[1])
        R = np.exp(rng.uniform(lo, hi, size=(n_bs, n_users)))
        d = max_demand * (1.0 - rng.random(n_users))
        return cls(R, resource_demand(R, d), M)


def _check_size(N, K):
    if N ** K > MAX_ASSIGNMENTS:
        raise InstanceTooLargeError(f"{N}**{K} assignments exceed {MAX_ASSIGNMENTS}")


def all_assignments(N: int, K: int) -> np.ndarray:
    """``(N**K, K)`` label matrix in enumeration order."""
    _check_size(N, K)
    idx = np.arange(N ** K)
    powers = N ** np.arange(K - 1, -1, -1)
    return (idx[:, None] // powers[None, :]) % N


def _per_bs_sums(labels, values, N):
    out = np.zeros((labels.shape[0], N))
    for n in range(N):
        out[:, n] = np.where(labels == n, values, 0.0).sum(axis=1)
    return out


def exhaustive_resource_opt(inst: TinyInstance):
    """Best budget-feasible integral assignment for the resource-based objective.

    Returns ``(Association, objective)``, or ``(None, -inf)`` when no
    assignment fits every BS's budget.
    """
    N, K = inst.shape
    A = all_assignments(N, K)
    cols = np.arange(K)
    s = inst.demand.s[A, cols]
    logR = np.log(inst.rates[A, cols])
    y = _per_bs_sums(A, s, N)
    score = (s * logR).sum(axis=1) - xlogy(y, y).sum(axis=1)
    feasible = np.all(y <= inst.M, axis=1)
    if not feasible.any():
        return None, float("-inf")
    score = np.where(feasible, score, -np.inf)
    best = Association.from_labels(A[int(np.argmax(score))], N)
    return best, objective_resource_based(best, inst.rates, inst.demand)


def exhaustive_user_opt(inst: TinyInstance, form: str = "relaxed"):
    """Best integral assignment for a user-count objective (no budget).

    ``form="relaxed"`` scores ``sum x (log R - log y)``; ``form="pf"`` scores
    ``sum log(J(y) R / y)`` with ``J`` the harmonic number.
    """
    if form not in ("relaxed", "pf"):
        raise DomainError(f"form must be 'relaxed' or 'pf', got {form!r}")
    N, K = inst.shape
    A = all_assignments(N, K)
    logR = np.log(inst.rates[A, np.arange(K)])
    c = _per_bs_sums(A, np.ones_like(logR), N)
    score = logR.sum(axis=1) - xlogy(c, c).sum(axis=1)
    if form == "pf":
        harmonic = np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1, K + 1))])
        score = score + xlogy(c, harmonic[c.astype(int)]).sum(axis=1)
    best = Association.from_labels(A[int(np.argmax(score))], N)
    value = objective_user_based(best, inst.rates) if form == "relaxed" \
        else objective_user_pf(best, inst.rates)
    return best, value
