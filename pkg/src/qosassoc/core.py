"""Association data model, subband demands, loads and objectives.

Conventions: ``x`` and ``s`` are ``(n_bs, n_users)``; logarithms are
natural; an unloaded BS contributes zero to every objective (``t log t -> 0``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .channel import RateMatrix
from .exceptions import DomainError

SIMPLEX_TOL = 1e-9


def as_rate_array(rates) -> np.ndarray:
    return np.asarray(rates.rates if isinstance(rates, RateMatrix) else rates, dtype=float)


@dataclass(frozen=True)
class Budget:
    """Subbands available at every BS."""

    M: float = 100

    def __post_init__(self):
        if not self.M > 0:
            raise DomainError(f"budget must be > 0, got {self.M}")


@dataclass(frozen=True)
class DemandProfile:
    d: np.ndarray
    s: np.ndarray


def resource_demand(rates, d) -> DemandProfile:
    """Subbands user ``k`` would need at BS ``n``: ``s[n, k] = d[k] / R[n, k]``."""
    R = as_rate_array(rates)
    d = np.asarray(d, dtype=float).reshape(-1)
    if R.ndim != 2 or d.shape[0] != R.shape[1]:
        raise DomainError(f"demand of length {d.shape[0]} does not match rates {R.shape}")
    if not np.all(R > 0) or not np.all(np.isfinite(R)):
        raise DomainError("rates must be strictly positive and finite")
    if not np.all(d > 0):
        raise DomainError("practical rates must be strictly positive")
    return DemandProfile(d=d, s=d[None, :] / R)


def sample_demand(mode: str, n_users: int, rng, identical_kbps: float = 1000.0,
                  max_kbps: float = 2000.0) -> np.ndarray:
    """Per-user practical rates: all ``identical_kbps``, or uniform on ``(0, max_kbps]``."""
    if mode == "identical":
        return np.full(n_users, float(identical_kbps))
    if mode == "uniform":
        # uniform on [0, 1) mapped to (0, 1]
        return max_kbps * (1.0 - rng.random(n_users))
    raise DomainError(f"unknown demand mode {mode!r}")


@dataclass(frozen=True, eq=False)
class Association:
    """Assignment of users to BSs, binary (``integral``) or fractional.

    Build through :meth:`from_labels` or :meth:`relaxed`; both check that
    every user's column lies on the probability simplex.
    """

    x: np.ndarray
    integral: bool

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        if x.ndim != 2:
            raise DomainError("association matrix must be 2-D (n_bs, n_users)")
        if np.any(x < -SIMPLEX_TOL) or np.any(x > 1 + SIMPLEX_TOL):
            raise DomainError("association entries must lie in [0, 1]")
        if x.shape[1] and np.max(np.abs(x.sum(axis=0) - 1.0)) > SIMPLEX_TOL:
            raise DomainError("every user must be associated with total weight 1")
        if self.integral and not np.all((x == 0) | (x == 1)):
            raise DomainError("integral association must be binary")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)

    @classmethod
    def from_labels(cls, labels, n_bs: int) -> "Association":
        labels = np.asarray(labels, dtype=int).reshape(-1)
        if labels.size and (labels.min() < 0 or labels.max() >= n_bs):
            raise DomainError("BS label out of range")
        x = np.zeros((n_bs, labels.size))
        x[labels, np.arange(labels.size)] = 1.0
        return cls(x, integral=True)

    @classmethod
    def relaxed(cls, x) -> "Association":
        return cls(np.clip(np.asarray(x, dtype=float), 0.0, 1.0), integral=False)

    @property
    def n_bs(self) -> int:
        return self.x.shape[0]

    @property
    def n_users(self) -> int:
        return self.x.shape[1]

    @property
    def labels(self) -> np.ndarray:
        """Serving BS per user (highest weight, lowest index on ties)."""
        return round_max_probability(self.x)

    def user_loads(self) -> np.ndarray:
        return self.x.sum(axis=1)

    def resource_loads(self, s) -> np.ndarray:
        return (self.x * np.asarray(s)).sum(axis=1)

    def rounded(self) -> "Association":
        return Association.from_labels(self.labels, self.n_bs)


def round_max_probability(x, tol: float = 1e-9) -> np.ndarray:
    """Per column, the lowest row index whose value is within ``tol`` of the max."""
    x = np.asarray(x, dtype=float)
    if x.shape[1] == 0:
        return np.zeros(0, dtype=int)
    near = x >= x.max(axis=0, keepdims=True) - tol
    return np.argmax(near, axis=0)


def load_efficiency(assoc: Association, rates, demand: DemandProfile) -> np.ndarray:
    """``R[n, k]`` divided by BS ``n``'s consumed subbands; NaN rows for empty BSs."""
    R = as_rate_array(rates)
    y = assoc.resource_loads(demand.s)
    with np.errstate(divide="ignore", invalid="ignore"):
        e = R / y[:, None]
    e[y <= 0] = np.nan
    return e


def harmonic_gain(y) -> float:
    """Multi-user diversity gain ``J(y) = sum_{i=1..y} 1/i``."""
    if int(y) != y or y < 1:
        raise DomainError(f"harmonic_gain needs an integer >= 1, got {y}")
    return float(np.sum(1.0 / np.arange(1, int(y) + 1)))


def pf_throughput(assoc: Association, rates) -> np.ndarray:
    """Long-term throughput per user under proportional-fair scheduling."""
    if not assoc.integral:
        raise DomainError("pf_throughput needs an integral association")
    R = as_rate_array(rates)
    labels = assoc.labels
    counts = assoc.user_loads().astype(int)
    gain = np.array([harmonic_gain(c) / c if c else 0.0 for c in counts])
    return gain[labels] * R[labels, np.arange(assoc.n_users)]


def _weighted_log_objective(x, w, logR, y):
    # sum_n sum_k x w (log R - log y); terms with x*w == 0 vanish
    xw = x * w
    with np.errstate(divide="ignore"):
        logy = np.log(np.where(y > 0, y, 1.0))
    return float(np.sum(xw * (logR - logy[:, None])))


def objective_user_based(assoc: Association, rates) -> float:
    """``sum x (log R - log y)`` with ``y`` the user count of each BS."""
    R = as_rate_array(rates)
    return _weighted_log_objective(assoc.x, 1.0, np.log(R), assoc.user_loads())


def objective_user_pf(assoc: Association, rates) -> float:
    """Integral log-utility of PF throughput: ``sum x log(J(y) R / y)``."""
    R = as_rate_array(rates)
    return float(np.sum(np.log(pf_throughput(assoc, R))))


def objective_resource_based(assoc: Association, rates, demand: DemandProfile) -> float:
    """``sum x s (log R - log y)`` with ``y`` the consumed subbands of each BS."""
    R = as_rate_array(rates)
    return _weighted_log_objective(assoc.x, demand.s, np.log(R), assoc.resource_loads(demand.s))


def resource_objective_eliminated(x, s, logR) -> float:
    """Same objective with the load substituted: ``sum x s log R - sum y log y``."""
    x = np.asarray(x)
    y = (x * s).sum(axis=1)
    return float(np.sum(x * s * logR) - np.sum(xlogy(y, y)))
