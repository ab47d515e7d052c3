import csv
import json

import numpy as np
import pytest

from qosassoc.config import ScenarioConfig
from qosassoc.experiment import (CSV_COLUMNS, emit_convergence, iterations_to_settle, read_rows,
                                 realize, run_sweep, run_trial, trial_seed)


def test_trial_seed_mixes_inputs():
    seeds = {trial_seed(m, u, t) for m in (0, 1) for u in (10, 20) for t in range(3)}
    assert len(seeds) == 12
    assert trial_seed(5, 10, 2) == trial_seed(5, 10, 2)


def test_smoke_single_macro():
    cfg = ScenarioConfig(n_macro=1, picos_per_macrocell=0, users_per_macrocell=(5,),
                         algorithms=("max_rate",), policies=("mprf",))
    rows = run_trial(cfg, 1).rows
    assert len(rows) == 1
    r = rows[0]
    assert r["n_users"] == 5 and 0.0 <= r["blocking"] <= 1.0 and r["jain_overall"] == 1.0


def test_paired_realization(small_config):
    tr = run_trial(small_config, trial_seed(0, 5, 0))
    assert len({r["realization"] for r in tr.rows}) == 1
    assert len(tr.rows) == 4 * 2
    assert all(r["error"] == "" for r in tr.rows)


def test_realization_deterministic(small_config):
    a, b = realize(small_config, 99), realize(small_config, 99)
    assert a.digest == b.digest
    assert realize(small_config, 100).digest != a.digest


def test_solver_failure_recorded(small_config, monkeypatch):
    from qosassoc import experiment
    from qosassoc.exceptions import SolverError

    real = experiment.run_algorithm

    def flaky(name, *args):
        if name == "max_probability":
            raise SolverError("boom")
        return real(name, *args)

    monkeypatch.setattr(experiment, "run_algorithm", flaky)
    rows = run_trial(small_config, 3).rows
    failed = [r for r in rows if r["error"]]
    assert len(failed) == 2 and all(r["algorithm"] == "max_probability" for r in failed)
    assert len(rows) == 8


def test_sweep_counts_and_summary(tmp_path, small_config):
    cfg = small_config.replace(users_per_macrocell=(4, 6), trials=2)
    res = run_sweep(cfg, tmp_path)
    assert len(res.rows) == 2 * 2 * 4 * 2
    rows = read_rows(tmp_path / "metrics.csv")
    assert len(rows) == len(res.rows)
    summary = json.loads((tmp_path / "summary.json").read_text())
    for g in summary["groups"]:
        sel = [r["blocking"] for r in rows if r["users_per_macrocell"] == g["users_per_macrocell"]
               and r["algorithm"] == g["algorithm"] and r["policy"] == g["policy"]]
        assert abs(np.mean(sel) - g["blocking_mean"]) <= 1e-12
        assert g["n"] == 2


def test_csv_header(tmp_path, small_config):
    run_sweep(small_config.replace(trials=1), tmp_path)
    with open(tmp_path / "metrics.csv") as fh:
        assert tuple(next(csv.reader(fh))) == CSV_COLUMNS


def test_sweep_deterministic(tmp_path, small_config):
    def body(path):
        with open(path) as fh:
            return [r[:-1] for r in csv.reader(fh)]  # drop wall_time
    run_sweep(small_config, tmp_path / "a")
    run_sweep(small_config, tmp_path / "b")
    assert body(tmp_path / "a" / "metrics.csv") == body(tmp_path / "b" / "metrics.csv")
    assert (tmp_path / "a" / "summary.json").read_bytes() == \
        (tmp_path / "b" / "summary.json").read_bytes()


def test_convergence_tables(tmp_path, small_config):
    tables = emit_convergence(small_config, 7, tmp_path)
    assert len(tables["max_rate"]) == 1
    qos = tables["qos_distributed"]
    assert [i for i, _ in qos] == list(range(len(qos)))
    assert np.all(np.isfinite([u for _, u in qos]))
    with open(tmp_path / "convergence_qos_distributed.csv") as fh:
        assert next(csv.reader(fh)) == ["iteration", "utility"]


def test_iterations_to_settle():
    assert iterations_to_settle([5.0, 3.0, 2.0, 2.0005, 2.0]) == 3
    assert iterations_to_settle([1.0]) == 1
    assert iterations_to_settle([1.0, 10.0, 1.0]) == 3
