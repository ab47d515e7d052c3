"""Price-based distributed association by dual decomposition.

Each round, users pick the BS maximising ``w[n, k] * (log R[n, k] - mu[n])``
given the broadcast prices ``mu``; every BS then computes its optimal supply
``y = min(exp(mu - 1), cap)`` and moves its price against the excess supply.
With ``w = s`` (subband demands) and ``cap = M`` this is the QoS-aware
resource-based scheme; with ``w = 1`` and no cap it is the user-count scheme
of Ye et al.
"""

from __future__ import annotations

import math

import numpy as np

from ..config import SolverOpts
from ..core import (Association, Budget, DemandProfile, as_rate_array,
                    objective_resource_based, objective_user_based)
from ._result import AlgorithmResult, IterationTrace, OpCounter


def user_choice_qos(rates, demand: DemandProfile, mu, k: int) -> int:
    """BS chosen by user ``k`` at prices ``mu`` (lowest index on ties)."""
    R = as_rate_array(rates)
    return _choose(demand.s[:, k], np.log(R[:, k]), np.asarray(mu, dtype=float))


def _choose(w_col, logR_col, mu):
    return int(np.argmax(w_col * (logR_col - mu)))


def bs_load_update(mu_n, M) -> float:
    """Optimal supply of one BS at price ``mu_n``, capped at ``M``."""
    M = M.M if isinstance(M, Budget) else M
    # exp overflows past ~709; the cap makes the value irrelevant there
    if mu_n - 1.0 >= math.log(M):
        return float(M)
    return math.exp(mu_n - 1.0)


def bs_multiplier_update(mu_n, y_n, demand_served, xi) -> float:
    """Raise the price when demand exceeds supply, lower it otherwise."""
    return mu_n - xi * (y_n - demand_served)


def _supply(mu, cap):
    with np.errstate(over="ignore"):
        return np.minimum(np.exp(mu - 1.0), cap)


def _dual_terms(mu, w, logR, cap):
    """Dual value and the maximizers that attain it."""
    util = w * (logR - mu[:, None])
    labels = np.argmax(util, axis=0)
    K = w.shape[1]
    H = float(util[labels, np.arange(K)].sum())
    y = _supply(mu, cap)
    I = float(np.sum(y * (mu - np.log(y))))
    return H + I, labels, y


def dual_value(mu, rates, demand: DemandProfile, M) -> float:
    """Dual objective ``G(mu) = H(mu) + I(mu)`` of the resource-based problem."""
    M = M.M if isinstance(M, Budget) else M
    R = as_rate_array(rates)
    G, _, _ = _dual_terms(np.asarray(mu, dtype=float), demand.s, np.log(R), M)
    return G


def ye_dual_value(mu, rates) -> float:
    """Dual objective of the user-count problem (unit weights, uncapped supply)."""
    R = as_rate_array(rates)
    G, _, _ = _dual_terms(np.asarray(mu, dtype=float), np.ones_like(R), np.log(R), np.inf)
    return G


def _has_converged(G, prev, tol):
    if prev is None:
        return False
    return abs(G - prev) <= tol * max(abs(prev), 1e-300)


def _run(w, logR, cap, mu0, opts: SolverOpts, objective) -> AlgorithmResult:
    N, K = w.shape
    mu = np.array(mu0, dtype=float)
    trace = []
    ops = None if opts.vectorized else OpCounter()
    prev = None
    converged = False
    cols = np.arange(K)
    for t in range(opts.max_iter):
        if opts.vectorized:
            G, labels, y = _dual_terms(mu, w, logR, cap)
            load = np.bincount(labels, weights=w[labels, cols], minlength=N)
            new_mu = mu - opts.step_size * (y - load)
        else:
            G, labels, y, load, new_mu = _agent_round(mu, w, logR, cap, opts.step_size, ops)
        assoc = Association.from_labels(labels, N)
        trace.append(IterationTrace(
            iteration=t, dual_value=G, primal_objective=objective(assoc), utility=G,
            supply=y, demand=load, mu=mu.copy(), feasible=bool(np.all(load <= cap))))
        if _has_converged(G, prev, opts.tol):
            converged = True
            break
        prev = G
        mu = new_mu
    return AlgorithmResult(association=assoc, trace=trace, converged=converged,
                           n_iter=len(trace), mu=mu, ops=ops)


def _agent_round(mu, w, logR, cap, xi, ops):
    # one synchronous round with each user and BS acting on local data only
    N, K = w.shape
    labels = np.empty(K, dtype=int)
    H = 0.0
    for k in range(K):
        labels[k] = _choose(w[:, k], logR[:, k], mu)
        H += w[labels[k], k] * (logR[labels[k], k] - mu[labels[k]])
    ops.user_candidates.append(N * K)
    y = np.empty(N)
    load = np.empty(N)
    new_mu = np.empty(N)
    reads = 0
    for n in range(N):
        mine = np.flatnonzero(labels == n)
        reads += mine.size
        load[n] = w[n, mine].sum()
        y[n] = bs_load_update(mu[n], cap)
        new_mu[n] = bs_multiplier_update(mu[n], y[n], load[n], xi)
    ops.bs_user_reads.append(reads)
    I = float(np.sum(y * (mu - np.log(y))))
    return H + I, labels, y, load, new_mu


def default_qos_prices(s, M) -> np.ndarray:
    """Initial prices at the mean load if every user took its cheapest BS.

    Resource analogue of the ``K / N`` start of the user-count scheme,
    clipped to ``(0, M]``.
    """
    s = np.asarray(s, dtype=float)
    N = s.shape[0]
    load = min(max(float(s.min(axis=0).sum()) / N, 1e-12), M)
    return np.full(N, 1.0 + math.log(load))


def mid_budget_prices(n_bs: int, M) -> np.ndarray:
    """Prices at which every BS supplies half its budget."""
    return np.full(n_bs, 1.0 + math.log(M / 2.0))


def default_ye_prices(n_bs: int, n_users: int) -> np.ndarray:
    """Initial prices at the mean user count ``y = K / N``."""
    return np.full(n_bs, 1.0 + math.log(n_users / n_bs))


def qos_distributed(rates, demand: DemandProfile, M=Budget(), opts: SolverOpts = SolverOpts(),
                    mu0=None) -> AlgorithmResult:
    """QoS-aware distributed association (resource-based load)."""
    M = M.M if isinstance(M, Budget) else M
    R = as_rate_array(rates)
    if mu0 is None:
        mu0 = default_qos_prices(demand.s, M)
    return _run(demand.s, np.log(R), M, mu0, opts,
                lambda a: objective_resource_based(a, R, demand))


def ye_distributed(rates, opts: SolverOpts = SolverOpts(), mu0=None) -> AlgorithmResult:
    """User-count distributed association; supply is left uncapped."""
    R = as_rate_array(rates)
    if mu0 is None:
        mu0 = default_ye_prices(*R.shape)
    return _run(np.ones_like(R), np.log(R), np.inf, mu0, opts,
                lambda a: objective_user_based(a, R))
