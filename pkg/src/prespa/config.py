"""Run configuration: a YAML document validated against fixed schemas."""

from __future__ import annotations

import copy
import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from .hilbert import DimensionError, ModeDims
from .model import DriveConfig, SystemParams


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    rtol: float = 1e-8
    atol: float = 1e-10

    def __post_init__(self):
        if not (0 < self.rtol < 1 and 0 < self.atol < 1):
            raise ValueError("tolerances must lie in (0, 1)")


@dataclass(frozen=True)
class SimulateConfig:
    t_end: float = 15.0
    n_points: int = 151
    initial_even_fock: tuple[int, ...] = (0, 2, 4)
    thermal: bool = True

    def __post_init__(self):
        object.__setattr__(self, "initial_even_fock", tuple(int(n) for n in self.initial_even_fock))
        if self.t_end <= 0 or self.n_points < 2:
            raise ValueError("simulate needs t_end > 0 and n_points >= 2")
        if any(n not in (0, 2, 4) for n in self.initial_even_fock):
            raise ValueError("initial_even_fock entries must be 0, 2 or 4")


@dataclass(frozen=True)
class SweepConfig:
    """Grid bounds as fractions of the angular reservoir decay rate."""

    omega1_max: float = 0.25
    omega2_max: float = 0.5
    n_grid: int = 200

    def __post_init__(self):
        if self.omega1_max <= 0 or self.omega2_max <= 0 or self.n_grid < 1:
            raise ValueError("sweep needs positive bounds and n_grid >= 1")


@dataclass(frozen=True)
class LifetimeConfig:
    kappa_cor: float = 0.25
    n_cav: int = 10
    t_end: float = 800.0
    n_points: int = 161
    uncorrected_t_end: float = 400.0
    cavity_dephasing: bool = True

    def __post_init__(self):
        if self.kappa_cor < 0 or self.n_cav < 8 or self.t_end <= 0 or self.n_points < 4:
            raise ValueError("lifetime needs kappa_cor >= 0, n_cav >= 8, t_end > 0, n_points >= 4")


@dataclass(frozen=True)
class ActiveConfig:
    tau_ex: float = 1.3
    eps_meas: float = 0.014
    eps_j: float = 0.039
    eps_nj: float = 0.014
    tau_cyc: float = 8.0
    gamma_up0: float = 0.3


@dataclass(frozen=True)
class BudgetConfig:
    kappa_cor: float = 0.25
    nbar: float = 3.0
    gamma_up: float = 0.7
    omega2: float = 160.0
    recovery_loss_per_cycle: float = 0.005
    active: ActiveConfig = field(default_factory=ActiveConfig)


@dataclass(frozen=True)
class WignerConfig:
    state: str = "binomial_zero"
    n_cav: int = 12
    extent: float = 3.2
    n_points: int = 81
    kerr_time: float = 0.0
    pgm: bool = False

    def __post_init__(self):
        if self.state not in WIGNER_STATES:
            raise ValueError(f"wigner state must be one of {sorted(WIGNER_STATES)}")
        if self.n_points < 2 or self.extent <= 0:
            raise ValueError("wigner grid needs n_points >= 2 and extent > 0")


WIGNER_STATES = {"vacuum", "fock1", "binomial_zero", "binomial_one", "binomial_plus"}


@dataclass(frozen=True)
class PlanConfig:
    guard_band: float = 10.0


@dataclass(frozen=True)
class HeatingConfig:
    T1ge: float = 50.0
    T1ef: float = 31.0


@dataclass(frozen=True)
class RunConfig:
    system: SystemParams = field(default_factory=SystemParams)
    drives: DriveConfig = field(default_factory=DriveConfig)
    dims: ModeDims = field(default_factory=ModeDims)
    solver: SolverConfig = field(default_factory=SolverConfig)
    simulate: SimulateConfig = field(default_factory=SimulateConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    lifetime: LifetimeConfig = field(default_factory=LifetimeConfig)
    budget: BudgetConfig = field(default_factory=BudgetConfig)
    wigner: WignerConfig = field(default_factory=WignerConfig)
    plan: PlanConfig = field(default_factory=PlanConfig)
    heating: HeatingConfig = field(default_factory=HeatingConfig)

    def to_dict(self) -> dict:
        return _plain(dataclasses.asdict(self))

    def hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def _build(cls, data: Any, path: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{path or 'config'} must be a mapping")
    known = {f.name: f for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigError(f"unknown key(s) in {path or 'config'}: {', '.join(unknown)}")
    kwargs = {}
    for name, value in data.items():
        f = known[name]
        sub = f.default_factory if f.default_factory is not dataclasses.MISSING else None
        if sub is not None and dataclasses.is_dataclass(sub):
            kwargs[name] = _build(sub, value, f"{path}.{name}" if path else name)
        elif isinstance(value, list):
            kwargs[name] = tuple(value)
        else:
            kwargs[name] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError, DimensionError) as exc:
        raise ConfigError(f"invalid {path or 'config'}: {exc}") from exc


def from_dict(data: dict | None) -> RunConfig:
    return _build(RunConfig, data or {}, "")


def default_document() -> dict:
    text = resources.files("prespa").joinpath("data/default.yaml").read_text()
    return yaml.safe_load(text)


def deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = deep_merge(out[k], v)
        else:
            out[k] = v
    return out


def load(path: str | Path | None = None) -> RunConfig:
    """Bundled defaults, overridden by the file at ``path`` when given."""
    doc = default_document()
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {p}")
        try:
            user = yaml.safe_load(p.read_text()) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {p}: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError(f"{p} must contain a mapping at top level")
        # validate the user document alone so unknown keys are reported against it
        from_dict(user)
        doc = deep_merge(doc, user)
    return from_dict(doc)
