"""Centralized max-probability association.

The resource-based problem is relaxed to ``x`` in the product of per-user
simplices, with the load substituted into the objective::

    maximize  sum_nk x s log R  -  sum_n y_n log y_n,   y_n = sum_k x_nk s_nk
    s.t.      y_n <= M

which is concave. The relaxed ``x[:, k]`` is read as user ``k``'s
association probabilities and each user is rounded to its most probable BS.

The default solver is a load-scaled gradient projection in resource mass
``z = x * s`` with a nonmonotone line search; the capacity rows are handled by an augmented
Lagrangian outer loop. ``centralized_method="primal_dual"`` instead runs the
literal KKT / multiplier-descent iteration over ``(gamma, lambda, mu, nu)``.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy.optimize import linprog
from scipy.special import xlogy

from ..config import SolverOpts
from ..core import (Association, Budget, DemandProfile, as_rate_array,
                    objective_resource_based, round_max_probability)
from ..exceptions import SolverError
from ._result import AlgorithmResult, IterationTrace

log = logging.getLogger(__name__)

_TINY = 1e-300
_FEAS_TOL = 1e-6


def relaxed_objective(x, s, logR) -> float:
    y = (x * s).sum(axis=1)
    return float(np.sum(x * s * logR) - np.sum(xlogy(y, y)))


def capacity_feasible(s, M) -> bool:
    """Whether some fractional assignment keeps every BS within ``M`` subbands."""
    N, K = s.shape
    if np.sum(s.min(axis=0)) > N * M:
        return False
    best = np.argmin(s, axis=0)
    if np.all(np.bincount(best, weights=s[best, np.arange(K)], minlength=N) <= M):
        return True
    # variables x[n, k] flattened row-major
    A_eq = np.zeros((K, N * K))
    for n in range(N):
        A_eq[np.arange(K), n * K + np.arange(K)] = 1.0
    A_ub = np.zeros((N, N * K))
    for n in range(N):
        A_ub[n, n * K:(n + 1) * K] = s[n]
    res = linprog(np.zeros(N * K), A_ub=A_ub, b_ub=np.full(N, M), A_eq=A_eq,
                  b_eq=np.ones(K), bounds=(0, 1), method="highs")
    return res.status == 0


def project_weighted_simplex_columns(V: np.ndarray, a: np.ndarray, b=None) -> np.ndarray:
    """Project each column of ``V`` onto ``{z >= 0, sum_n a[n] z[n] = 1}``.

    The projection is in the metric ``sum_n (a[n] / b[n]) (z[n] - v[n])**2``;
    ``b = a`` (the default) gives the Euclidean projection.
    """
    b = a if b is None else b
    N, K = V.shape
    order = np.argsort(-(V / b), axis=0)
    Vs = np.take_along_axis(V, order, axis=0)
    As = np.take_along_axis(a, order, axis=0)
    Bs = np.take_along_axis(b, order, axis=0)
    theta = (np.cumsum(As * Vs, axis=0) - 1.0) / np.cumsum(As * Bs, axis=0)
    active = Vs - theta * Bs > 0
    j = N - 1 - np.argmax(active[::-1], axis=0)
    th = theta[j, np.arange(K)]
    return np.maximum(V - th[None, :] * b, 0.0)


class _Problem:
    """Negated relaxed objective in resource mass ``z = x * s``.

    With ``y_n = sum_k z_nk`` the objective ``sum z log R - sum y log y`` has
    bounded curvature in ``z`` even when some ``s`` are astronomically large,
    which is the usual case for links far below the serving BS. Feasible
    ``z`` columns lie on the weighted simplex ``sum_n z_nk / s_nk = 1``.
    """

    def __init__(self, s, logR, M):
        self.a = 1.0 / s
        self.logR, self.M = logR, M
        self.lam = np.zeros(s.shape[0])
        self.rho = 0.0

    def project(self, z, b=None):
        return project_weighted_simplex_columns(z, self.a, b)

    def value(self, z):
        y = z.sum(axis=1)
        v = -(np.sum(z * self.logR) - np.sum(xlogy(y, y)))
        if self.rho:
            m = np.maximum(0.0, self.lam + self.rho * (y - self.M))
            v += np.sum(m * m - self.lam * self.lam) / (2 * self.rho)
        return v

    def grad(self, z):
        y = z.sum(axis=1)
        g = np.log(np.maximum(y, _TINY)) + 1.0
        if self.rho:
            g = g + np.maximum(0.0, self.lam + self.rho * (y - self.M))
        return g[:, None] - self.logR

    def scale(self, z, floor):
        """Inverse diagonal curvature per BS row."""
        # y log y has curvature 1/y along every entry of a row at once; dividing
        # by the participation ratio y^2 / sum z^2 keeps the step from
        # overshooting when many users share a BS
        y = np.maximum(z.sum(axis=1), floor)
        curv = y / np.maximum((z * z).sum(axis=1), floor * floor)
        if self.rho:
            curv = curv + self.rho * (self.lam + self.rho * (y - self.M) > 0)
        return (1.0 / curv)[:, None]


def _sgp(prob: _Problem, z, tol, max_iter, on_iter, memory=10, floor=1e-12, rel_floor=1e-6):
    """Scaled gradient projection with a nonmonotone Armijo search.

    Row ``n`` is scaled by the inverse curvature of its load term, ``y_n``
    for ``y log y`` alone; without it BSs holding a vanishing share of load
    stall plain projected gradient.
    """
    F = prob.value(z)
    history = [F]
    for it in range(max_iter):
        g = prob.grad(z)
        # the scale floor is relative to the mean load so that near-empty rows
        # still take (and report) steps of a meaningful size
        scale = prob.scale(z, max(floor, rel_floor * float(z.sum()) / z.shape[0]))
        d = prob.project(z - scale * g, prob.a * scale) - z
        gd = float(np.sum(g * d))
        if -gd <= tol * max(1.0, abs(F)):
            return z, True, it
        ref = max(history[-memory:])
        lam = 1.0
        while True:
            zn = z + lam * d
            Fn = prob.value(zn)
            if Fn <= ref + 1e-4 * lam * gd or lam < 1e-20:
                break
            lam *= 0.5
        z, F = zn, Fn
        history.append(F)
        on_iter(z)
    return z, False, max_iter


def solve_relaxed(s, logR, M, tol=1e-9, max_iter=5000, on_iter=None, enforce_capacity=None):
    """Maximise the relaxed objective; returns ``(x, converged, capacity_enforced)``.

    When no fractional assignment fits the budget, the capacity rows are
    dropped and the load term alone spreads the users.
    """
    N, K = s.shape
    report = (lambda z: on_iter(z / s)) if on_iter else (lambda z: None)
    if N == 1:
        x = np.ones((1, K))
        report(x * s)
        return x, True, True
    if enforce_capacity is None:
        enforce_capacity = capacity_feasible(s, M)
        if not enforce_capacity:
            log.info("budget infeasible for %d users on %d BSs; solving without capacity", K, N)
    prob = _Problem(s, logR, M)
    # start from each user's cheapest BS
    best = np.argmin(s, axis=0)
    z = np.zeros((N, K))
    z[best, np.arange(K)] = s[best, np.arange(K)]
    z, ok, _ = _sgp(prob, z, tol, max_iter, report)
    if enforce_capacity:
        prob.rho = 1.0 / M
        prev_viol = np.inf
        for _ in range(60):
            y = z.sum(axis=1)
            # joint feasibility / complementarity residual
            viol = float(np.max(np.abs(np.maximum(y - M, -prob.lam / prob.rho))))
            if viol <= _FEAS_TOL * M and ok:
                break
            prob.lam = np.maximum(0.0, prob.lam + prob.rho * (y - M))
            if viol > 0.25 * prev_viol:
                prob.rho = min(prob.rho * 10.0, 1e8)
            prev_viol = viol
            z, ok, _ = _sgp(prob, z, tol, max_iter, report)
        ok = ok and float(np.max(z.sum(axis=1) - M)) <= 1e-6 * M
    x = np.clip(z / s, 0.0, 1.0)
    # absorb projection round-off so every column sums to one
    x /= x.sum(axis=0, keepdims=True)
    return x, ok, enforce_capacity


def max_probability(rates, demand: DemandProfile, M=Budget(),
                    opts: SolverOpts = SolverOpts()) -> AlgorithmResult:
    """Solve the relaxation, then round each user to its most probable BS."""
    M = M.M if isinstance(M, Budget) else M
    R = as_rate_array(rates)
    s = demand.s
    if not np.all(np.isfinite(s)) or not np.all(s > 0):
        raise SolverError("subband demands must be positive and finite")
    if opts.centralized_method == "primal_dual":
        return _primal_dual(R, demand, M, opts)
    logR = np.log(R)
    N = R.shape[0]
    trace = []

    def record(x):
        labels = round_max_probability(x)
        rounded = Association.from_labels(labels, N)
        val = relaxed_objective(x, s, logR)
        trace.append(IterationTrace(
            iteration=len(trace), dual_value=float("nan"),
            primal_objective=objective_resource_based(rounded, R, demand), utility=val,
            demand=(x * s).sum(axis=1)))

    try:
        x, converged, enforced = solve_relaxed(s, logR, M, opts.relaxed_tol,
                                               opts.relaxed_max_iter, record)
    except (FloatingPointError, ValueError) as exc:
        raise SolverError(f"relaxed solve failed: {exc}") from exc
    if not np.all(np.isfinite(x)):
        raise SolverError("relaxed solve produced non-finite iterates")
    if not trace:
        record(x)
    relaxed = Association.relaxed(x)
    assoc = Association.from_labels(round_max_probability(x), N)
    return AlgorithmResult(association=assoc, trace=trace, converged=converged,
                           n_iter=len(trace), relaxed=relaxed,
                           relaxed_objective=relaxed_objective(x, s, logR),
                           capacity_enforced=enforced)


def _primal_dual(R, demand, M, opts):
    # KKT-based x, y followed by projected multiplier descent; the per-(n, k)
    # load from the y stationarity condition is averaged over users.
    s = demand.s
    N, K = s.shape
    logR = np.log(R)
    xi = opts.step_size
    gamma = np.zeros(K)
    lam = np.zeros(N)
    mu = np.full(N, 1.0 + math.log(M / 2.0))
    nu = np.zeros((N, K))
    x = np.zeros((N, K))
    x[np.argmax(R, axis=0), np.arange(K)] = 1.0
    trace = []
    converged = False
    for t in range(opts.max_iter):
        with np.errstate(over="ignore", invalid="ignore"):
            Y = np.exp(np.clip(logR - (gamma[None, :] + lam[:, None] * s + nu) / s, -700, 700))
            x_new = np.maximum((lam - mu)[:, None] * Y / s, 0.0)
        y = Y.mean(axis=1)
        delta = float(np.max(np.abs(x_new - x)))
        x = x_new
        gamma = gamma - xi * (1.0 - x.sum(axis=0))
        lam = lam - xi * (y - (s * x).sum(axis=1))
        mu = np.maximum(mu - xi * (M - y), 0.0)
        nu = np.maximum(nu - xi * (1.0 - x), 0.0)
        labels = round_max_probability(x)
        rounded = Association.from_labels(labels, N)
        obj = objective_resource_based(rounded, R, demand)
        trace.append(IterationTrace(iteration=t, dual_value=float("nan"), primal_objective=obj,
                                    utility=obj, supply=y, demand=(s * x).sum(axis=1),
                                    mu=mu.copy()))
        if t > 0 and delta <= opts.tol:
            converged = True
            break
    col = x.sum(axis=0)
    probs = np.where(col > 0, x / np.where(col > 0, col, 1.0), 1.0 / N)
    return AlgorithmResult(association=Association.from_labels(round_max_probability(x), N),
                           trace=trace, converged=converged, n_iter=len(trace), mu=mu,
                           relaxed=Association.relaxed(probs),
                           relaxed_objective=relaxed_objective(probs, s, logR))
