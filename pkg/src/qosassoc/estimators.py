"""Scikit-learn style wrappers around the association algorithms.

Each estimator takes ``X`` with one row per user and one column per BS
(achievable rates in Kbps, the transpose of the functional layout) and
learns ``labels_``, the serving BS of every user. Practical rates go in
through the ``demand`` fit parameter.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .algorithms import max_probability, max_rate_assoc, qos_distributed, ye_distributed
from .config import SolverOpts
from .core import resource_demand
from .exceptions import DomainError


def check_rates(X, n_bs: int | None = None) -> np.ndarray:
    """Validate a ``(n_users, n_bs)`` rate matrix and return it as ``(n_bs, n_users)``."""
    X = check_array(X, dtype=np.float64, ensure_all_finite=True)
    if np.any(X <= 0):
        raise DomainError("rates must be strictly positive")
    if n_bs is not None and X.shape[1] != n_bs:
        raise DomainError(f"X has {X.shape[1]} BS columns, expected {n_bs}")
    return np.ascontiguousarray(X.T)


def check_demand(demand, n_users: int, default: float | None = None) -> np.ndarray:
    """Per-user practical rates; ``default`` fills in when ``demand`` is None."""
    if demand is None:
        if default is None:
            raise DomainError("this estimator needs per-user demand")
        return np.full(n_users, float(default))
    d = check_array(np.asarray(demand, dtype=float).reshape(1, -1), ensure_all_finite=True).ravel()
    if d.shape[0] != n_users:
        raise DomainError(f"demand has {d.shape[0]} entries for {n_users} users")
    return d


class _AssociationBase(ClusterMixin, BaseEstimator):

    def _store(self, res, R):
        self.association_ = res.association
        self.labels_ = res.association.labels
        self.trace_ = res.trace
        self.n_iter_ = res.n_iter
        self.converged_ = bool(res.converged)
        self.n_features_in_ = R.shape[0]
        return self


class MaxRateAssociation(_AssociationBase):
    """Every user joins the BS offering the highest achievable rate."""

    def fit(self, X, y=None, demand=None):
        R = check_rates(X)
        return self._store(max_rate_assoc(R), R)

    def predict(self, X):
        check_is_fitted(self, "labels_")
        R = check_rates(X, self.n_features_in_)
        return np.argmax(R, axis=0)


class _PricedAssociation(_AssociationBase):
    # shared predict/transform for the price-based schemes

    def _weights(self, R, demand):
        raise NotImplementedError

    def transform(self, X, demand=None):
        """Per-user utility of every BS at the learned prices, ``(n_users, n_bs)``."""
        check_is_fitted(self, "mu_")
        R = check_rates(X, self.n_features_in_)
        w = self._weights(R, demand)
        return (w * (np.log(R) - self.mu_[:, None])).T

    def predict(self, X, demand=None):
        """Serving BS each user would pick at the learned prices."""
        return np.argmax(self.transform(X, demand), axis=1)


class QoSDistributedAssociation(_PricedAssociation):
    """Price-based association on resource load (subbands consumed).

    Parameters
    ----------
    n_subbands : float
        Budget ``M`` of every BS.
    step_size, tol, max_iter : float, float, int
        Price step, relative dual-change tolerance and round cap.
    mu_init : array-like or None
        Starting prices; None uses the mean cheapest-BS load.
    default_demand : float or None
        Practical rate used when ``fit`` gets no ``demand``.
    """

    def __init__(self, n_subbands=100, step_size=0.01, tol=1e-3, max_iter=200, mu_init=None,
                 default_demand=None):
        self.n_subbands = n_subbands
        self.step_size = step_size
        self.tol = tol
        self.max_iter = max_iter
        self.mu_init = mu_init
        self.default_demand = default_demand

    def _weights(self, R, demand):
        d = check_demand(demand, R.shape[1], self.default_demand)
        return resource_demand(R, d).s

    def fit(self, X, y=None, demand=None):
        R = check_rates(X)
        d = check_demand(demand, R.shape[1], self.default_demand)
        opts = SolverOpts(step_size=self.step_size, tol=self.tol, max_iter=self.max_iter)
        res = qos_distributed(R, resource_demand(R, d), self.n_subbands, opts, self.mu_init)
        self.mu_ = res.mu
        return self._store(res, R)


class YeAssociation(_PricedAssociation):
    """Price-based association on user counts (demand is ignored)."""

    def __init__(self, step_size=0.01, tol=1e-3, max_iter=200, mu_init=None):
        self.step_size = step_size
        self.tol = tol
        self.max_iter = max_iter
        self.mu_init = mu_init

    def _weights(self, R, demand):
        return np.ones_like(R)

    def fit(self, X, y=None, demand=None):
        R = check_rates(X)
        opts = SolverOpts(step_size=self.step_size, tol=self.tol, max_iter=self.max_iter)
        res = ye_distributed(R, opts, self.mu_init)
        self.mu_ = res.mu
        return self._store(res, R)


class MaxProbabilityAssociation(_AssociationBase):
    """Relaxed centralized solve rounded to each user's most probable BS.

    ``association_probabilities_`` holds the relaxed solution as
    ``(n_users, n_bs)``. There is no ``predict``: the solution couples all
    users, so new users need a new fit.
    """

    def __init__(self, n_subbands=100, tol=1e-9, max_iter=5000, method="projected_gradient",
                 step_size=0.01, default_demand=None):
        self.n_subbands = n_subbands
        self.tol = tol
        self.max_iter = max_iter
        self.method = method
        self.step_size = step_size
        self.default_demand = default_demand

    def fit(self, X, y=None, demand=None):
        R = check_rates(X)
        d = check_demand(demand, R.shape[1], self.default_demand)
        opts = SolverOpts(step_size=self.step_size, centralized_method=self.method,
                          relaxed_tol=self.tol, relaxed_max_iter=self.max_iter)
        res = max_probability(R, resource_demand(R, d), self.n_subbands, opts)
        self.association_probabilities_ = res.relaxed.x.T.copy()
        self.relaxed_objective_ = res.relaxed_objective
        self.capacity_enforced_ = res.capacity_enforced
        return self._store(res, R)
