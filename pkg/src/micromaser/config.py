"""Experiment configuration: schema, strict parsing and defaults.

Config documents are JSON objects with the sections ``field``,
``reservoir``, ``coupling``, ``integrator`` and ``run``; unknown sections
or keys are rejected by name so misspelled physics parameters cannot
silently fall back to defaults.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Any, Mapping

from .analytics import bose_einstein_occupation
from .dynamics import IntegratorSettings
from .errors import ConfigError, SettingsError
from .models import (
    MULTILEVEL,
    CouplingSpec,
    FieldSpec,
    ReservoirSpec,
    multilevel_populations,
    reservoir_steady_photon_number,
)

#: Clamp for the automatic Fock truncation choice.
AUTO_DIM_MIN = 15
AUTO_DIM_MAX = 120

_SCHEMA: dict[str, dict[str, type]] = {
    "field": {"Omega": float, "T_f0": float, "dim": int},
    "reservoir": {"kind": str, "N": int, "T_a": float, "omega": float},
    "coupling": {"g": float, "tau": float, "tau0": float, "gamma": float, "kappa": float},
    "integrator": {"dt": float},
    "run": {"collisions_max": int},
}


@dataclass(frozen=True)
class SimulationConfig:
    """Validated description of one collision-model experiment."""

    field: FieldSpec
    reservoir: ReservoirSpec
    coupling: CouplingSpec
    integrator: IntegratorSettings | None = None
    collisions_max: int | None = None
    seed: int = 0  # reserved: the pipeline is deterministic
    output_path: str = ""

    def __post_init__(self):
        if self.collisions_max is not None:
            object.__setattr__(self, "collisions_max", int(self.collisions_max))
            if self.collisions_max < 0:
                raise ConfigError(
                    f"run.collisions_max must be >= 0, got {self.collisions_max}"
                )

    def with_overrides(self, collisions: int | None = None, dim: int | None = None) -> "SimulationConfig":
        """Copy with CLI-level overrides applied."""
        cfg = self
        if collisions is not None:
            cfg = replace(cfg, collisions_max=collisions)
        if dim is not None:
            cfg = replace(cfg, field=replace(cfg.field, dim=dim))
        return cfg


def default_fock_dim(Omega: float, T_f0: float, reservoir: ReservoirSpec) -> int:
    """Truncation default 10*(n_eff + 1) clamped to [15, 120].

    ``n_eff`` is the larger of the initial and the steady-state occupation,
    so cooling runs keep room for the hot initial state.
    """
    n_target = reservoir_steady_photon_number(reservoir)
    n_initial = bose_einstein_occupation(Omega, T_f0) if T_f0 > 0 else 0.0
    n_eff = max(n_target, n_initial)
    return min(AUTO_DIM_MAX, max(AUTO_DIM_MIN, math.ceil(10.0 * (n_eff + 1.0))))


def _section(data: Mapping[str, Any], name: str) -> dict[str, Any]:
    raw = data.get(name, {})
    if not isinstance(raw, Mapping):
        raise ConfigError(f"section {name!r} must be an object")
    known = _SCHEMA[name]
    out: dict[str, Any] = {}
    for key, value in raw.items():
        if key not in known:
            raise ConfigError(f"unknown key {name}.{key}")
        want = known[key]
        if want is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{name}.{key} must be a number, got {value!r}")
            value = float(value)
        elif want is int:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{name}.{key} must be an integer, got {value!r}")
        elif want is str and not isinstance(value, str):
            raise ConfigError(f"{name}.{key} must be a string, got {value!r}")
        out[key] = value
    return out


def _require(section: Mapping[str, Any], name: str, key: str) -> Any:
    if key not in section:
        raise ConfigError(f"missing required key {name}.{key}")
    return section[key]


def config_from_mapping(data: Mapping[str, Any]) -> SimulationConfig:
    """Build and fully validate a :class:`SimulationConfig` from a mapping."""
    if not isinstance(data, Mapping):
        raise ConfigError("config document must be a JSON object")
    for section_name in data:
        if section_name not in _SCHEMA:
            raise ConfigError(f"unknown section {section_name!r}")

    field_raw = _section(data, "field")
    reservoir_raw = _section(data, "reservoir")
    coupling_raw = _section(data, "coupling")
    integrator_raw = _section(data, "integrator")
    run_raw = _section(data, "run")

    omega_field = field_raw.get("Omega", 1.0)
    reservoir = ReservoirSpec(
        kind=_require(reservoir_raw, "reservoir", "kind"),
        N=_require(reservoir_raw, "reservoir", "N"),
        T_a=_require(reservoir_raw, "reservoir", "T_a"),
        omega=reservoir_raw.get("omega", omega_field),  # resonant by default
    )
    if reservoir.kind == MULTILEVEL:
        # surfaces the gain-regime rejection at parse time
        multilevel_populations(reservoir.N, reservoir.omega, reservoir.T_a)

    coupling = CouplingSpec(
        g=_require(coupling_raw, "coupling", "g"),
        tau=_require(coupling_raw, "coupling", "tau"),
        tau0=coupling_raw.get("tau0", 0.0),
        gamma=coupling_raw.get("gamma", 1e-9),
        kappa=coupling_raw.get("kappa", 0.5e-10),
    )

    dim = field_raw.get("dim")
    if dim is None:
        dim = default_fock_dim(omega_field, field_raw.get("T_f0", 0.0), reservoir)
    field = FieldSpec(
        Omega=omega_field,
        dim=dim,
        T_f0=_require(field_raw, "field", "T_f0"),
    )

    integrator = IntegratorSettings(dt=integrator_raw.get("dt", coupling.tau / 20.0))
    if integrator.dt > coupling.tau / 20.0 * (1.0 + 1e-12):
        raise SettingsError(
            f"integrator.dt={integrator.dt:g} exceeds the collision accuracy "
            f"floor tau/20={coupling.tau / 20.0:g}"
        )

    return SimulationConfig(
        field=field,
        reservoir=reservoir,
        coupling=coupling,
        integrator=integrator,
        collisions_max=run_raw.get("collisions_max"),
    )


def parse_config(text: str) -> SimulationConfig:
    """Parse a JSON config document into a validated :class:`SimulationConfig`."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return config_from_mapping(data)


def config_to_mapping(config: SimulationConfig) -> dict[str, Any]:
    """Inverse of :func:`config_from_mapping` (fully explicit keys)."""
    out: dict[str, Any] = {
        "field": {
            "Omega": config.field.Omega,
            "T_f0": config.field.T_f0,
            "dim": config.field.dim,
        },
        "reservoir": {
            "kind": config.reservoir.kind,
            "N": config.reservoir.N,
            "T_a": config.reservoir.T_a,
            "omega": config.reservoir.omega,
        },
        "coupling": {
            "g": config.coupling.g,
            "tau": config.coupling.tau,
            "tau0": config.coupling.tau0,
            "gamma": config.coupling.gamma,
            "kappa": config.coupling.kappa,
        },
    }
    if config.integrator is not None:
        out["integrator"] = {"dt": config.integrator.dt}
    if config.collisions_max is not None:
        out["run"] = {"collisions_max": config.collisions_max}
    return out
