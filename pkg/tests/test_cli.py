import csv
import json

from qosassoc.cli import build_parser, main, resolve_config


def _cfg(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("n_macro: 2\npicos_per_macrocell: 1\nusers_per_macrocell: [4]\ntrials: 1\n")
    return str(p)


def test_flags_override_config(tmp_path):
    args = build_parser().parse_args(["run", "--config", _cfg(tmp_path), "--seed", "9",
                                      "--trials", "3", "--algorithms", "max_rate",
                                      "--policy", "marf"])
    cfg = resolve_config(args)
    assert (cfg.seed, cfg.trials, cfg.algorithms, cfg.policies) == (9, 3, ("max_rate",), ("marf",))
    assert cfg.n_macro == 2


def test_run_writes_outputs(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["run", "--config", _cfg(tmp_path), "--out", str(out)]) == 0
    with open(out / "metrics.csv") as fh:
        assert len(list(csv.reader(fh))) == 1 + 4 * 2
    assert "groups" in json.loads((out / "summary.json").read_text())
    assert "wrote" in capsys.readouterr().out


def test_trial_writes_traces(tmp_path):
    out = tmp_path / "t"
    assert main(["trial", "--config", _cfg(tmp_path), "--out", str(out),
                 "--algorithms", "qos_distributed,max_rate"]) == 0
    assert (out / "trial.csv").exists()
    with open(out / "trace_qos_distributed.csv") as fh:
        assert next(csv.reader(fh)) == ["iteration", "dual_value", "primal_objective", "utility"]


def test_converge(tmp_path, capsys):
    out = tmp_path / "c"
    assert main(["converge", "--config", _cfg(tmp_path), "--out", str(out)]) == 0
    assert (out / "convergence_ye_distributed.csv").exists()
    assert "settled_after" in capsys.readouterr().out


def test_verify(tmp_path, capsys):
    out = tmp_path / "v"
    assert main(["verify", "--trials", "4", "--out", str(out)]) == 0
    rows = json.loads((out / "verify.json").read_text())
    assert len(rows) == 4 and all(r["bound_ok"] and r["dual_ok"] for r in rows)


def test_config_errors_exit_2(tmp_path, capsys):
    p = tmp_path / "bad.yaml"
    p.write_text("bogus_key: 1\n")
    assert main(["run", "--config", str(p), "--out", str(tmp_path)]) == 2
    assert "bogus_key" in capsys.readouterr().err
    assert main(["run", "--policy", "fifo", "--out", str(tmp_path)]) == 2
    assert main(["run", "--config", str(tmp_path / "missing.yaml")]) == 2
