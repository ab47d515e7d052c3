"""Monte-Carlo trials, density sweeps and convergence traces.

Seeds: trial ``t`` at density ``u`` draws everything from
``SeedSequence([master_seed, u, t])``, whose three spawned children seed the
topology, the shadowing and the demand draw in that order. Every algorithm
in a trial therefore sees the same realization, identified in each row by
a hash of its rate matrix and demands.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .algorithms import (AlgorithmResult, max_probability, max_rate_assoc, qos_distributed,
                         ye_distributed)
from .channel import PropagationParams, Topology, generate_topology, rates_for, realize_channel
from .config import ScenarioConfig, SolverOpts
from .core import DemandProfile, objective_resource_based, resource_demand, sample_demand
from .exceptions import DomainError, SolverError
from .metrics import compute_metrics
from .scheduling import schedule

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "scenario_id", "users_per_macrocell", "trial", "trial_seed", "realization", "algorithm",
    "policy", "n_users", "served", "blocking", "jain_overall", "jain_macro", "iterations",
    "converged", "final_utility", "error", "wall_time",
)
SUMMARY_METRICS = ("blocking", "jain_overall", "jain_macro", "final_utility", "iterations")


def trial_seed(master_seed: int, users_per_macrocell: int, trial: int) -> int:
    """64-bit seed of one trial, mixed from the master seed, density and index."""
    state = np.random.SeedSequence([master_seed, users_per_macrocell, trial]).generate_state(
        2, np.uint32)
    return int(state[0]) << 32 | int(state[1])


@dataclass(frozen=True)
class Realization:
    topology: Topology
    rates: object
    demand: DemandProfile
    seed: int

    @property
    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.rates.rates).tobytes())
        h.update(np.ascontiguousarray(self.demand.d).tobytes())
        return h.hexdigest()[:16]


def realize(config: ScenarioConfig, seed: int, users_per_macrocell: int | None = None) -> Realization:
    """Topology, channel and demands drawn from one trial seed."""
    topo_ss, chan_ss, dem_ss = np.random.SeedSequence(seed).spawn(3)
    topo = generate_topology(config, topo_ss, users_per_macrocell)
    channel = realize_channel(topo, PropagationParams.from_config(config), chan_ss)
    rates = rates_for(topo, channel, config)
    d = sample_demand(config.demand_mode, topo.n_users, np.random.default_rng(dem_ss),
                      config.demand_kbps, config.demand_max_kbps)
    return Realization(topo, rates, resource_demand(rates, d), seed)


def run_algorithm(name: str, rates, demand: DemandProfile, M: float,
                  opts: SolverOpts) -> AlgorithmResult:
    if name == "max_rate":
        return max_rate_assoc(rates)
    if name == "ye_distributed":
        return ye_distributed(rates, opts)
    if name == "qos_distributed":
        return qos_distributed(rates, demand, M, opts)
    if name == "max_probability":
        return max_probability(rates, demand, M, opts)
    raise DomainError(f"unknown algorithm {name!r}")


def scenario_id(config: ScenarioConfig, users_per_macrocell: int) -> str:
    cfg = config.to_dict()
    for key in ("seed", "trials", "users_per_macrocell", "algorithms", "policies"):
        cfg.pop(key)
    text = json.dumps(cfg, sort_keys=True)
    return f"{hashlib.sha256(text.encode()).hexdigest()[:8]}-u{users_per_macrocell}"


@dataclass
class TrialResult:
    rows: list[dict]
    results: dict[str, AlgorithmResult]
    realization: Realization


def run_trial(config: ScenarioConfig, seed: int, users_per_macrocell: int | None = None,
              trial: int = 0) -> TrialResult:
    """Run every configured algorithm and policy on one realization.

    A solver failure turns that algorithm's rows into error rows; the other
    algorithms still run.
    """
    upm = config.users_per_macrocell[0] if users_per_macrocell is None else int(users_per_macrocell)
    real = realize(config, seed, upm)
    opts = config.solver_opts()
    M = float(config.n_subbands)
    K = real.topology.n_users
    base = {"scenario_id": scenario_id(config, upm), "users_per_macrocell": upm, "trial": trial,
            "trial_seed": seed, "realization": real.digest, "n_users": K}
    rows, results = [], {}
    for name in config.algorithms:
        t0 = time.perf_counter()
        try:
            res = run_algorithm(name, real.rates, real.demand, M, opts)
        except (SolverError, DomainError, FloatingPointError, ValueError) as exc:
            log.warning("%s failed on trial seed %d: %s", name, seed, exc)
            for policy in config.policies:
                rows.append({**base, "algorithm": name, "policy": policy, "served": 0,
                             "blocking": float("nan"), "jain_overall": float("nan"),
                             "jain_macro": float("nan"), "iterations": 0, "converged": False,
                             "final_utility": float("nan"), "error": str(exc) or type(exc).__name__,
                             "wall_time": time.perf_counter() - t0})
            continue
        wall = time.perf_counter() - t0
        results[name] = res
        utility = objective_resource_based(res.association, real.rates, real.demand)
        for policy in config.policies:
            outcome = schedule(res.association, real.demand, M, policy, real.rates)
            m = compute_metrics(outcome, real.topology, utility)
            rows.append({**base, "algorithm": name, "policy": policy, "served": m.served_count,
                         "blocking": m.blocking, "jain_overall": m.jain_overall,
                         "jain_macro": m.jain_macro, "iterations": res.n_iter,
                         "converged": bool(res.converged), "final_utility": m.total_utility,
                         "error": "", "wall_time": wall})
    return TrialResult(rows, results, real)


@dataclass
class ExperimentResult:
    rows: list[dict]
    summary: list[dict] = field(default_factory=list)

    def select(self, **match) -> list[dict]:
        return [r for r in self.rows if all(r[k] == v for k, v in match.items())]


def summarize(rows: list[dict]) -> list[dict]:
    """Mean and sample std per (density, algorithm, policy), failed rows excluded."""
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        groups.setdefault((r["users_per_macrocell"], r["algorithm"], r["policy"]), []).append(r)
    out = []
    for (upm, alg, pol), grp in groups.items():
        ok = [r for r in grp if not r["error"]]
        entry = {"users_per_macrocell": upm, "algorithm": alg, "policy": pol,
                 "n": len(ok), "failed": len(grp) - len(ok)}
        for key in SUMMARY_METRICS:
            v = np.array([r[key] for r in ok], dtype=float)
            v = v[~np.isnan(v)]
            entry[f"{key}_mean"] = float(v.mean()) if v.size else None
            entry[f"{key}_std"] = float(v.std(ddof=1)) if v.size > 1 else (0.0 if v.size else None)
        out.append(entry)
    return out


def _fmt(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_rows(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in CSV_COLUMNS])


def read_rows(path) -> list[dict]:
    """Inverse of :func:`write_rows` for numeric columns."""
    ints = {"users_per_macrocell", "trial", "trial_seed", "n_users", "served", "iterations"}
    floats = {"blocking", "jain_overall", "jain_macro", "final_utility", "wall_time"}
    rows = []
    with open(path, newline="") as fh:
        for r in csv.DictReader(fh):
            for k in ints:
                r[k] = int(r[k])
            for k in floats:
                r[k] = float(r[k])
            r["converged"] = r["converged"] == "1"
            rows.append(r)
    return rows


def run_sweep(config: ScenarioConfig, out_dir=None,
              progress: Callable[[int, int, int], None] | None = None) -> ExperimentResult:
    """``config.trials`` trials at every density; optional ``metrics.csv`` and ``summary.json``."""
    if not config.users_per_macrocell:
        raise DomainError("density list is empty")
    rows = []
    for upm in config.users_per_macrocell:
        for t in range(config.trials):
            seed = trial_seed(config.seed, upm, t)
            rows.extend(run_trial(config, seed, upm, trial=t).rows)
            if progress:
                progress(upm, t, config.trials)
    result = ExperimentResult(rows, summarize(rows))
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_rows(rows, out / "metrics.csv")
        (out / "summary.json").write_text(
            json.dumps({"config": config.to_dict(), "groups": result.summary}, indent=2) + "\n")
    return result


def convergence_table(res: AlgorithmResult) -> list[tuple[int, float]]:
    return [(tr.iteration, tr.utility) for tr in res.trace]


def emit_convergence(config: ScenarioConfig, seed: int | None = None, out_dir=None,
                     users_per_macrocell: int | None = None) -> dict[str, list[tuple[int, float]]]:
    """Utility per iteration of each configured algorithm on one realization.

    Distributed solvers report their dual value, max-probability the
    relaxed objective of each iterate, max-rate a single point.
    """
    seed = trial_seed(config.seed, config.users_per_macrocell[0], 0) if seed is None else seed
    real = realize(config, seed, users_per_macrocell)
    opts = config.solver_opts()
    tables = {}
    for name in config.algorithms:
        res = run_algorithm(name, real.rates, real.demand, float(config.n_subbands), opts)
        tables[name] = convergence_table(res)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, table in tables.items():
            with open(out / f"convergence_{name}.csv", "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(("iteration", "utility"))
                w.writerows((i, repr(u)) for i, u in table)
    return tables


def iterations_to_settle(values, tol: float = 1e-3) -> int:
    """First iteration count after which the value is within ``tol`` relative of the last one."""
    v = np.asarray(values, dtype=float)
    final = v[-1]
    close = np.abs(v - final) <= tol * max(abs(final), 1e-300)
    # last index that was not close, plus one
    far = np.flatnonzero(~close)
    return int(far[-1] + 2) if far.size else 1
