"""Greedy admission of associated users under each BS's subband budget."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Association, Budget, DemandProfile, as_rate_array
from .exceptions import DomainError


@dataclass(frozen=True)
class ScheduleOutcome:
    """Per-BS served and blocked user ids plus consumed subbands ``rho``."""

    served: tuple[tuple[int, ...], ...]
    blocked: tuple[tuple[int, ...], ...]
    consumed: np.ndarray

    @property
    def n_served(self) -> int:
        return sum(len(s) for s in self.served)

    @property
    def n_blocked(self) -> int:
        return sum(len(b) for b in self.blocked)

    def served_mask(self, n_users: int) -> np.ndarray:
        mask = np.zeros(n_users, dtype=bool)
        for ids in self.served:
            mask[list(ids)] = True
        return mask


def admission_order(users, keys) -> np.ndarray:
    """``users`` sorted by descending key, ascending user id on ties."""
    users = np.asarray(users, dtype=int)
    return users[np.lexsort((users, -np.asarray(keys, dtype=float)))]


def schedule(assoc: Association, demand: DemandProfile, M=Budget(), policy: str = "mprf",
             rates=None) -> ScheduleOutcome:
    """Admit each BS's users greedily, most valuable first.

    ``"mprf"`` ranks users by practical rate ``d_k``, ``"marf"`` by achievable
    rate ``R[n, k]`` at the serving BS. A user that does not fit in the
    remaining budget is blocked and the scan moves on to the next one.
    """
    if not assoc.integral:
        raise DomainError("scheduling needs an integral association")
    M = M.M if isinstance(M, Budget) else M
    policy = policy.lower()
    if policy == "marf":
        if rates is None:
            raise DomainError("MARF needs the rate matrix")
        R = as_rate_array(rates)
    elif policy != "mprf":
        raise DomainError(f"unknown policy {policy!r}")
    labels = assoc.labels
    s = demand.s
    served, blocked = [], []
    consumed = np.zeros(assoc.n_bs)
    for n in range(assoc.n_bs):
        mine = np.flatnonzero(labels == n)
        keys = demand.d[mine] if policy == "mprf" else R[n, mine]
        used = 0.0
        ok, no = [], []
        for k in admission_order(mine, keys):
            if used + s[n, k] <= M:
                used += s[n, k]
                ok.append(int(k))
            else:
                no.append(int(k))
        served.append(tuple(ok))
        blocked.append(tuple(no))
        consumed[n] = used
    return ScheduleOutcome(tuple(served), tuple(blocked), consumed)
