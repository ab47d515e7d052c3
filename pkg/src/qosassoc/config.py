"""Scenario and solver configuration.

A config file is a flat mapping (YAML or JSON) whose keys are exactly the
field names of :class:`ScenarioConfig`; see ``README.md`` for the table.
Unknown keys are rejected.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

import yaml

from .exceptions import ConfigurationError

ALGORITHMS = ("max_rate", "ye_distributed", "qos_distributed", "max_probability")
POLICIES = ("mprf", "marf")
LAYOUTS = ("hex", "square")
DEMAND_MODES = ("identical", "uniform")
CENTRALIZED_METHODS = ("projected_gradient", "primal_dual")

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class SolverOpts:
    """Knobs shared by the iterative association algorithms.

    ``step_size`` is the multiplier step for the distributed solvers and
    every multiplier step of the primal-dual centralized iteration.
    ``tol`` is the relative dual-value change that declares convergence.
    """

    step_size: float = 0.01
    tol: float = 1e-3
    max_iter: int = 200
    centralized_method: str = "projected_gradient"
    # inner accuracy of the relaxed centralized solve
    relaxed_tol: float = 1e-9
    relaxed_max_iter: int = 5000
    vectorized: bool = True

    def __post_init__(self):
        if not self.step_size > 0:
            raise ConfigurationError(f"step_size must be > 0, got {self.step_size}")
        if not self.tol >= 0:
            raise ConfigurationError(f"tol must be >= 0, got {self.tol}")
        if self.max_iter < 1:
            raise ConfigurationError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.centralized_method not in CENTRALIZED_METHODS:
            raise ConfigurationError(
                f"centralized_method must be one of {CENTRALIZED_METHODS}")


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to reproduce a sweep from a master seed.

    Physical defaults follow the two-tier setup (46/20 dBm, exponents
    3/3.5, shadowing 8/10 dB, reference distances 50/1 m, 2 GHz,
    180 kHz subbands, 100 subbands per BS). Grid size, radius, pico count,
    densities and trial count are desk-scale choices.
    """

    layout: str = "hex"
    n_macro: int = 7
    cell_radius: float = 500.0
    picos_per_macrocell: int = 3
    users_per_macrocell: tuple[int, ...] = (10, 20, 30, 40, 50)
    tx_power_macro_dbm: float = 46.0
    tx_power_pico_dbm: float = 20.0
    pathloss_exp_macro: float = 3.0
    pathloss_exp_pico: float = 3.5
    shadowing_std_macro_db: float = 8.0
    shadowing_std_pico_db: float = 10.0
    ref_distance_macro: float = 50.0
    ref_distance_pico: float = 1.0
    carrier_hz: float = 2.0e9
    bandwidth_hz: float = 20.0e6
    subband_khz: float = 180.0
    n_subbands: int = 100
    noise_density_dbm_hz: float = -174.0
    rate_floor_kbps: float = 1e-6
    demand_mode: str = "uniform"
    demand_kbps: float = 1000.0
    demand_max_kbps: float = 2000.0
    algorithms: tuple[str, ...] = ALGORITHMS
    policies: tuple[str, ...] = POLICIES
    step_size: float = 0.01
    tol: float = 1e-3
    max_iter: int = 200
    centralized_method: str = "projected_gradient"
    trials: int = 20
    seed: int = 0

    def __post_init__(self):
        # coerce list-like fields so configs loaded from YAML/JSON hash and compare
        upm = self.users_per_macrocell
        if isinstance(upm, (int, float)):
            upm = (upm,)
        object.__setattr__(self, "users_per_macrocell", tuple(int(u) for u in upm))
        for name in ("algorithms", "policies"):
            val = getattr(self, name)
            if isinstance(val, str):
                val = tuple(v.strip() for v in val.split(",") if v.strip())
            object.__setattr__(self, name, tuple(val))
        self.validate()

    def validate(self):
        if self.layout not in LAYOUTS:
            raise ConfigurationError(f"layout must be one of {LAYOUTS}, got {self.layout!r}")
        if self.n_macro < 1:
            raise ConfigurationError("n_macro must be >= 1")
        if not self.cell_radius > 0:
            raise ConfigurationError("cell_radius must be > 0")
        if self.picos_per_macrocell < 0:
            raise ConfigurationError("picos_per_macrocell must be >= 0")
        if not self.users_per_macrocell:
            raise ConfigurationError("users_per_macrocell must be nonempty")
        if min(self.users_per_macrocell) < 1:
            raise ConfigurationError("users_per_macrocell entries must be >= 1")
        positive = ("pathloss_exp_macro", "pathloss_exp_pico", "ref_distance_macro",
                    "ref_distance_pico", "carrier_hz", "bandwidth_hz", "subband_khz",
                    "rate_floor_kbps", "demand_kbps", "demand_max_kbps")
        for name in positive:
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ConfigurationError(f"{name} must be positive and finite, got {v}")
        for name in ("shadowing_std_macro_db", "shadowing_std_pico_db"):
            if not getattr(self, name) >= 0:
                raise ConfigurationError(f"{name} must be >= 0")
        if self.n_subbands < 1:
            raise ConfigurationError("n_subbands must be >= 1")
        if self.demand_mode not in DEMAND_MODES:
            raise ConfigurationError(f"demand_mode must be one of {DEMAND_MODES}")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad or not self.algorithms:
            raise ConfigurationError(f"unknown algorithms {bad}; choose from {ALGORITHMS}")
        bad = [p for p in self.policies if p not in POLICIES]
        if bad or not self.policies:
            raise ConfigurationError(f"unknown policies {bad}; choose from {POLICIES}")
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")
        if self.seed < 0:
            raise ConfigurationError("seed must be >= 0")
        self.solver_opts()  # validates step_size / tol / max_iter / method

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    def solver_opts(self) -> SolverOpts:
        return SolverOpts(step_size=self.step_size, tol=self.tol, max_iter=self.max_iter,
                          centralized_method=self.centralized_method)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        out = dataclasses.asdict(self)
        for k, v in out.items():
            if isinstance(v, tuple):
                out[k] = list(v)
        return out

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "ScenarioConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(f"unknown config keys: {unknown}")
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        values = {}
        try:
            for key, val in data.items():
                # YAML 1.1 reads "1e-06" as a string, so scalars are coerced by field type
                if types[key] == "float":
                    val = float(val)
                elif types[key] == "int":
                    if float(val) != int(float(val)):
                        raise ConfigurationError(f"{key} must be an integer, got {val!r}")
                    val = int(float(val))
                values[key] = val
            return cls(**values)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(str(exc)) from exc


def load_config(path: str | Path) -> ScenarioConfig:
    """Read a flat YAML/JSON config file."""
    path = Path(path)
    text = path.read_text()
    data = (json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)) or {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: config must be a flat mapping")
    nested = [k for k, v in data.items() if isinstance(v, dict)]
    if nested:
        raise ConfigurationError(f"{path}: nested sections are not allowed: {nested}")
    return ScenarioConfig.from_mapping(data)


def parse_list(value: str | Sequence[str]) -> tuple[str, ...]:
    if isinstance(value, str):
        return tuple(v.strip() for v in value.split(",") if v.strip())
    return tuple(value)
