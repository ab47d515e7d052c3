import json

import pytest

from qosassoc.config import ScenarioConfig, SolverOpts, load_config
from qosassoc.exceptions import ConfigurationError


def test_defaults():
    cfg = ScenarioConfig()
    assert (cfg.tx_power_macro_dbm, cfg.tx_power_pico_dbm) == (46.0, 20.0)
    assert (cfg.pathloss_exp_macro, cfg.pathloss_exp_pico) == (3.0, 3.5)
    assert (cfg.shadowing_std_macro_db, cfg.shadowing_std_pico_db) == (8.0, 10.0)
    assert (cfg.ref_distance_macro, cfg.ref_distance_pico) == (50.0, 1.0)
    assert (cfg.carrier_hz, cfg.bandwidth_hz, cfg.subband_khz) == (2e9, 20e6, 180.0)
    assert cfg.n_subbands == 100 and cfg.noise_density_dbm_hz == -174.0
    assert cfg.users_per_macrocell == (10, 20, 30, 40, 50) and cfg.trials == 20
    assert (cfg.step_size, cfg.tol, cfg.max_iter) == (0.01, 1e-3, 200)


def test_yaml_roundtrip(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("n_macro: 3\nusers_per_macrocell: [5, 7]\nalgorithms: max_rate,qos_distributed\n")
    cfg = load_config(p)
    assert cfg.n_macro == 3 and cfg.users_per_macrocell == (5, 7)
    assert cfg.algorithms == ("max_rate", "qos_distributed")


def test_json_and_to_dict(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps(ScenarioConfig(seed=4).to_dict()))
    assert load_config(p) == ScenarioConfig(seed=4)


def test_unknown_and_nested_keys(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("n_macro: 3\nradius: 4\n")
    with pytest.raises(ConfigurationError, match="radius"):
        load_config(p)
    p.write_text("channel:\n  n_macro: 3\n")
    with pytest.raises(ConfigurationError):
        load_config(p)


@pytest.mark.parametrize("bad", [
    {"cell_radius": -1.0}, {"n_subbands": 0}, {"demand_mode": "x"}, {"algorithms": ("nope",)},
    {"policies": ("fifo",)}, {"trials": 0}, {"step_size": 0.0}, {"carrier_hz": float("inf")},
    {"users_per_macrocell": ()}, {"layout": "tri"},
])
def test_invalid_values(bad):
    with pytest.raises(ConfigurationError):
        ScenarioConfig(**bad)


def test_solver_opts_validation():
    with pytest.raises(ConfigurationError):
        SolverOpts(max_iter=0)
    with pytest.raises(ConfigurationError):
        SolverOpts(centralized_method="simplex")


def test_scalar_coercion():
    cfg = ScenarioConfig.from_mapping({"rate_floor_kbps": "1e-06", "n_macro": "3"})
    assert cfg.rate_floor_kbps == 1e-6 and cfg.n_macro == 3
    with pytest.raises(ConfigurationError):
        ScenarioConfig.from_mapping({"n_macro": 2.5})
    with pytest.raises(ConfigurationError):
        ScenarioConfig.from_mapping({"cell_radius": "wide"})
