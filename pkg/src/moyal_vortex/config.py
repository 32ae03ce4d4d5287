"""Strict JSON experiment configuration.

Every numeric constraint of the underlying modules is re-validated at parse
time; unknown keys are rejected by name.  Defaults (documented in
docs/config.md and in --help) are applied here and echoed verbatim into the
output metadata so a run is reproducible from its metadata record alone.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any

from .moyal import MoyalParams
from .reduced import LatticeVariant


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


@dataclass(frozen=True)
class GridConfig:
    n: int = 128
    L: float = 8.0


@dataclass(frozen=True)
class AnsatzConfig:
    a: float = 2.0
    omega: float = 0.5
    R: float = 2.1708037636747557
    V: float = 0.0
    sigma: float = 0.0
    m: int = 1


@dataclass(frozen=True)
class EvolutionSection:
    dt: float = 1e-3
    t_end: float = 1.0
    snapshot_every: int = 100
    star_backend: str = "landau"  # "quadrature" | "landau"
    landau_cutoff: int = 16


@dataclass(frozen=True)
class SweepConfig:
    R_min: float = 1.0
    R_max: float = 10.0
    steps: int = 64


@dataclass(frozen=True)
class StatesConfig:
    """States for the stationary-residual sweep: phi_n indices and sigma scan."""

    phi_indices: tuple[int, ...] = (0, 1, 2)
    sigma_min: float = -4.0
    sigma_max: float = 2.0
    sigma_steps: int = 121
    drop_laplacian: bool = False


@dataclass(frozen=True)
class ReducedConfig:
    """Initial data for the reduced peak integration."""

    R0: float = 2.192511801411503  # 1% outside the first stable radius
    V0: float = 0.0
    dt: float = 0.02
    t_end: float = 80.0


@dataclass(frozen=True)
class ExperimentConfig:
    grid: GridConfig = GridConfig()
    theta: float = 1.0
    variant: str = "charge1_quadratic"
    ansatz: AnsatzConfig = AnsatzConfig()
    evolution: EvolutionSection = EvolutionSection()
    sweep: SweepConfig = SweepConfig()
    states: StatesConfig = StatesConfig()
    reduced: ReducedConfig = ReducedConfig()
    fixed_points_n_max: int = 30
    output_dir: str = "out"

    @property
    def moyal_params(self) -> MoyalParams:
        return MoyalParams(theta=self.theta)

    @property
    def lattice_variant(self) -> LatticeVariant:
        return LatticeVariant(self.variant)

    def resolved(self) -> dict[str, Any]:
        """Full config with every default made explicit (for metadata)."""
        return asdict(self)


_SECTION_TYPES = {
    "grid": GridConfig,
    "ansatz": AnsatzConfig,
    "evolution": EvolutionSection,
    "sweep": SweepConfig,
    "states": StatesConfig,
    "reduced": ReducedConfig,
}

_SCALAR_KEYS = {"theta", "variant", "fixed_points_n_max", "output_dir"}


def _build_section(name: str, cls, raw: Any):
    if not isinstance(raw, dict):
        raise ConfigError(f"{name}: expected an object")
    fields = {f: t for f, t in cls.__dataclass_fields__.items()}
    for key in raw:
        if key not in fields:
            raise ConfigError(f"unknown key '{name}.{key}'")
    coerced = {}
    for key, value in raw.items():
        if key == "phi_indices":
            if not isinstance(value, list) or not all(
                isinstance(v, int) and not isinstance(v, bool) for v in value
            ):
                raise ConfigError(f"{name}.{key}: expected a list of integers")
            coerced[key] = tuple(value)
        else:
            coerced[key] = value
    try:
        return cls(**coerced)
    except TypeError as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def _require_number(name: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name}: expected a number")
    return float(value)


def _require_int(name: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name}: expected an integer")
    return value


def _validate(cfg: ExperimentConfig) -> ExperimentConfig:
    g = cfg.grid
    if _require_int("grid.n", g.n) % 2 != 0 or g.n < 8:
        raise ConfigError("grid.n: must be even and >= 8")
    if _require_number("grid.L", g.L) <= 0:
        raise ConfigError("grid.L: must be positive")
    if not _require_number("theta", cfg.theta) >= 0:
        raise ConfigError("theta: must be >= 0")
    if cfg.variant not in {v.value for v in LatticeVariant}:
        raise ConfigError(
            f"variant: '{cfg.variant}' is not one of "
            f"{sorted(v.value for v in LatticeVariant)}"
        )
    a = cfg.ansatz
    for key in ("a", "omega", "R"):
        if _require_number(f"ansatz.{key}", getattr(a, key)) <= 0:
            raise ConfigError(f"ansatz.{key}: must be positive")
    _require_number("ansatz.V", a.V)
    _require_number("ansatz.sigma", a.sigma)
    if _require_int("ansatz.m", a.m) < 1:
        raise ConfigError("ansatz.m: must be >= 1")
    e = cfg.evolution
    if _require_number("evolution.dt", e.dt) <= 0:
        raise ConfigError("evolution.dt: must be positive")
    if _require_number("evolution.t_end", e.t_end) < e.dt:
        raise ConfigError("evolution.t_end: must be >= evolution.dt")
    if _require_int("evolution.snapshot_every", e.snapshot_every) < 1:
        raise ConfigError("evolution.snapshot_every: must be >= 1")
    if e.star_backend not in ("quadrature", "landau"):
        raise ConfigError("evolution.star_backend: must be 'quadrature' or 'landau'")
    if _require_int("evolution.landau_cutoff", e.landau_cutoff) < 1:
        raise ConfigError("evolution.landau_cutoff: must be >= 1")
    s = cfg.sweep
    if _require_number("sweep.R_min", s.R_min) <= 0:
        raise ConfigError("sweep.R_min: must be positive")
    if _require_number("sweep.R_max", s.R_max) <= s.R_min:
        raise ConfigError("sweep.R_max: must exceed sweep.R_min")
    if _require_int("sweep.steps", s.steps) < 2:
        raise ConfigError("sweep.steps: must be >= 2")
    st = cfg.states
    if any(i < 0 for i in st.phi_indices):
        raise ConfigError("states.phi_indices: indices must be >= 0")
    if _require_int("states.sigma_steps", st.sigma_steps) < 2:
        raise ConfigError("states.sigma_steps: must be >= 2")
    if not isinstance(st.drop_laplacian, bool):
        raise ConfigError("states.drop_laplacian: expected a boolean")
    r = cfg.reduced
    if _require_number("reduced.R0", r.R0) <= 0:
        raise ConfigError("reduced.R0: must be positive")
    _require_number("reduced.V0", r.V0)
    if _require_number("reduced.dt", r.dt) <= 0:
        raise ConfigError("reduced.dt: must be positive")
    if _require_number("reduced.t_end", r.t_end) < r.dt:
        raise ConfigError("reduced.t_end: must be >= reduced.dt")
    if _require_int("fixed_points_n_max", cfg.fixed_points_n_max) < 1:
        raise ConfigError("fixed_points_n_max: must be >= 1")
    if not isinstance(cfg.output_dir, str) or not cfg.output_dir:
        raise ConfigError("output_dir: expected a non-empty string")
    return cfg


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a JSON config document."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("top level: expected an object")

    kwargs: dict[str, Any] = {}
    for key, value in raw.items():
        if key in _SECTION_TYPES:
            kwargs[key] = _build_section(key, _SECTION_TYPES[key], value)
        elif key in _SCALAR_KEYS:
            kwargs[key] = value
        else:
            raise ConfigError(f"unknown key '{key}'")
    return _validate(ExperimentConfig(**kwargs))
