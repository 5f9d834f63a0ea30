from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any

from .constants import LayerKind, Scenario
from .dynamics import StepPolicy
from .errors import ConfigError
from .profiles import PROFILES, InverseLinearProfile

THREADS_ENV = "HYDROLIMIT_THREADS"


@dataclass
class ToleranceConfig:
    """Acceptance tolerances of the scenario checks."""

    energy_drift: float = 1e-6
    momentum_drift: float = 1e-8
    velocity_match: float = 1e-4
    window_timing: float = 1e-6
    free_transport: float = 1e-10
    field: float = 2e-2
    residual: float = 1e-4
    xi3_factor: float = 5.0

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ConfigError(f"Tolerance '{f.name}' must be positive, got {getattr(self, f.name)!r}")


@dataclass
class StepConfig:
    """Step-size controls of the 2D integrator."""

    interaction_fraction: float = 1e-3
    stability_factor: float = 5e-2
    step_floor: float = 1e-15
    bisection_tolerance: float = 1e-12
    lattice_bits: int = 54

    def policy(self, energy_tolerance: float) -> StepPolicy:
        try:
            return StepPolicy(
                interaction_fraction=self.interaction_fraction,
                stability_factor=self.stability_factor,
                step_floor=self.step_floor,
                bisection_tolerance=self.bisection_tolerance,
                energy_tolerance=energy_tolerance,
                lattice_bits=self.lattice_bits,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


@dataclass
class RunConfig:
    """Run configuration."""

    scenario: Scenario = Scenario.GHOST
    N: list[int] | None = None
    horizon: float = 1.0
    snapshots: int = 201
    bins: int | None = None
    out: str = "out"
    seed: int | None = None
    kind: LayerKind = LayerKind.TWO
    profile: str = InverseLinearProfile.profile_id
    threads: int = 1
    tolerances: ToleranceConfig | None = None
    step: StepConfig | None = None

    def __post_init__(self):
        if self.tolerances is None:
            self.tolerances = ToleranceConfig()
        if self.step is None:
            self.step = StepConfig()
        if self.N is None:
            self.N = [8]
        if not self.N or any(int(n) != n or n < 1 for n in self.N):
            raise ConfigError(f"N must be a list of positive integers, got {self.N!r}")
        self.N = [int(n) for n in self.N]
        if not self.horizon > 0:
            raise ConfigError(f"horizon must be positive, got {self.horizon!r}")
        if self.snapshots < 2:
            raise ConfigError(f"snapshots must be at least 2, got {self.snapshots!r}")
        if self.bins is not None and self.bins < 1:
            raise ConfigError(f"bins must be positive, got {self.bins!r}")
        if self.threads < 1:
            raise ConfigError(f"threads must be positive, got {self.threads!r}")
        if self.profile not in PROFILES:
            raise ConfigError(f"Unknown profile '{self.profile}' (known: {', '.join(sorted(PROFILES))})")

    @property
    def policy(self) -> StepPolicy:
        return self.step.policy(self.tolerances.energy_drift)

    def as_dict(self) -> dict[str, Any]:
        return {
            "scenario": self.scenario.value,
            "N": list(self.N),
            "horizon": self.horizon,
            "snapshots": self.snapshots,
            "bins": self.bins,
            "out": self.out,
            "seed": self.seed,
            "kind": self.kind.value,
            "profile": self.profile,
            "threads": self.threads,
            "tol": {f.name: getattr(self.tolerances, f.name) for f in fields(ToleranceConfig)},
            "step": {f.name: getattr(self.step, f.name) for f in fields(StepConfig)},
        }


def load_config(config_path: str | Path | None = None) -> RunConfig:
    """
    Load configuration from a JSON file.

    Tolerances may be given as a nested "tol" object or as flat "tol.<name>" keys.
    HYDROLIMIT_THREADS overrides the thread count of the file.

    Args:
        config_path: Path to config file. Defaults to config.json in project root.

    Returns:
        RunConfig object with loaded values or defaults.

    Raises:
        ConfigError: If the file is not valid JSON or holds invalid values
    """
    if config_path is None:
        config_path = Path(__file__).parent.parent / "config.json"
    else:
        config_path = Path(config_path)

    data: dict[str, Any] = {}
    if config_path.exists():
        try:
            with open(config_path, "r") as f:
                data = json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{config_path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{config_path}: expected a JSON object")

    config = config_from_mapping(data)
    threads = os.environ.get(THREADS_ENV)
    if threads:
        config = apply_overrides(config, {"threads": threads})
    return config


def config_from_mapping(data: dict[str, Any]) -> RunConfig:
    return apply_overrides(RunConfig(), data)


def apply_overrides(config: RunConfig, overrides: dict[str, Any]) -> RunConfig:
    """
    Return a copy of `config` with the given keys replaced.

    Keys are RunConfig field names, "tol"/"step" objects, or flat "tol.<name>" and
    "step.<name>" keys. None values are ignored.

    Raises:
        ConfigError: On unknown keys or values of the wrong type
    """
    tol = {f.name: getattr(config.tolerances, f.name) for f in fields(ToleranceConfig)}
    step = {f.name: getattr(config.step, f.name) for f in fields(StepConfig)}
    top: dict[str, Any] = {}
    for key, value in overrides.items():
        if value is None:
            continue
        if key in ("tol", "step") and isinstance(value, dict):
            for sub, sub_value in value.items():
                _set_nested(tol if key == "tol" else step, key, sub, sub_value)
        elif key.startswith("tol.") or key.startswith("step."):
            group, sub = key.split(".", 1)
            _set_nested(tol if group == "tol" else step, group, sub, value)
        elif key in _TOP_LEVEL:
            top[key] = _TOP_LEVEL[key](value)
        else:
            raise ConfigError(f"Unknown configuration key '{key}'")
    try:
        return replace(config, tolerances=ToleranceConfig(**tol), step=StepConfig(**step), **top)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def _set_nested(target: dict[str, Any], group: str, key: str, value: Any) -> None:
    if key not in target:
        raise ConfigError(f"Unknown configuration key '{group}.{key}'")
    target[key] = _as_float(value, f"{group}.{key}")


def _as_float(value: Any, name: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"'{name}' must be a number, got {value!r}")


def _as_int(name: str):
    def convert(value: Any) -> int:
        try:
            number = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"'{name}' must be an integer, got {value!r}")
        if number != int(number):
            raise ConfigError(f"'{name}' must be an integer, got {value!r}")
        return int(number)

    return convert


def _as_n_list(value: Any) -> list[int]:
    if isinstance(value, str):
        value = [part for part in value.split(",") if part.strip()]
    if not isinstance(value, (list, tuple)):
        value = [value]
    return [_as_int("N")(v) for v in value]


def _as_enum(enum_type):
    def convert(value: Any):
        try:
            return enum_type(value)
        except ValueError:
            known = ", ".join(member.value for member in enum_type)
            raise ConfigError(f"Unknown {enum_type.__name__.lower()} {value!r} (known: {known})")

    return convert


_TOP_LEVEL = {
    "scenario": _as_enum(Scenario),
    "N": _as_n_list,
    "horizon": lambda v: _as_float(v, "horizon"),
    "snapshots": _as_int("snapshots"),
    "bins": _as_int("bins"),
    "out": str,
    "seed": _as_int("seed"),
    "kind": _as_enum(LayerKind),
    "profile": str,
    "threads": _as_int("threads"),
}
