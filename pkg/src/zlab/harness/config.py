"""Experiment configuration read from a YAML mapping."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..energetics import BoundsConfig
from ..integrate import StepperConfig
from ..spectral import ConfigError, Grid, make_grid
from ..yosida import INF, check_level, level_str
from ..zakharov import InitialData, InputError

EXPERIMENTS = ("simulate", "cauchy", "invariants", "growth", "depend", "selfcheck")

_KEYS = {"experiment", "grid", "datum", "n_list", "stepper", "bounds", "output_dir", "seed", "epsilons",
         "resolution_check", "gn_constant"}


def _length(value) -> float:
    if isinstance(value, str):
        txt = value.strip().lower().replace(" ", "")
        if txt == "pi":
            return math.pi
        if txt.endswith("*pi") or txt.endswith("pi"):
            return float(txt.rstrip("pi").rstrip("*") or 1.0) * math.pi
    return float(value)


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    grid: Grid = field(default_factory=lambda: make_grid(math.pi, 128))
    datum: InitialData = field(default_factory=InitialData.default)
    n_list: tuple = (64,)
    stepper: StepperConfig = field(default_factory=StepperConfig)
    bounds: BoundsConfig | None = None
    output_dir: str | None = None
    seed: int = 0
    epsilons: tuple = (0.1, 0.05, 0.01, 0.005, 0.001, 0.0005)
    resolution_check: bool = False
    gn_constant: float = 1.0
    raw: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment: must be one of {EXPERIMENTS}, got {self.experiment!r}")
        if not self.n_list:
            raise ConfigError("n_list: must be nonempty")
        if len(set(self.n_list)) != len(self.n_list):
            raise ConfigError(f"n_list: repeated levels in {[level_str(n) for n in self.n_list]}")
        if self.experiment == "cauchy":
            for n in self.n_list:
                if n == INF or n & (n - 1):
                    raise ConfigError(f"n_list: cauchy needs finite powers of two, got {level_str(n)}")
            if list(self.n_list) != sorted(self.n_list):
                raise ConfigError("n_list: cauchy levels must be ascending")
        if any(not (e >= 0 and math.isfinite(e)) for e in self.epsilons):
            raise ConfigError("epsilons: must be finite and non-negative")
        if not self.gn_constant > 0:
            raise ConfigError("gn_constant: must be positive")

    def echo(self) -> dict:
        """Config as written, minus where it was written to."""
        out = {k: v for k, v in self.raw.items() if k != "output_dir"}
        out["experiment"] = self.experiment
        out["seed"] = self.seed
        return out


def from_mapping(d: dict, experiment: str | None = None, seed: int | None = None) -> ExperimentConfig:
    if not isinstance(d, dict):
        raise ConfigError("config: top level must be a mapping")
    unknown = set(d) - _KEYS
    if unknown:
        raise ConfigError(f"config: unknown keys {sorted(unknown)}")
    d = dict(d)
    if experiment is not None:
        # the command line wins, so one config can drive several experiments
        d["experiment"] = experiment
    if seed is not None:
        d["seed"] = seed
    try:
        g = d.get("grid") or {}
        grid = make_grid(_length(g.get("L", math.pi)), int(g.get("N", 128)), bool(g.get("dealias", True)))
        datum = InitialData.from_mapping(d["datum"]) if d.get("datum") else InitialData.default()
        n_list = tuple(check_level(n) for n in d.get("n_list", [64]))
        s = d.get("stepper") or {}
        stepper = StepperConfig(
            method=str(s.get("method", "etdrk4")),
            dt=float(s.get("dt", 1e-3)),
            T=float(s.get("T", 1.0)),
            observe_every=int(s.get("observe_every", 1)),
        )
        b = d.get("bounds")
        bounds = None if b in (None, "auto") else BoundsConfig(float(b["C_M1"]), float(b["C_M2"]))
        return ExperimentConfig(
            experiment=str(d.get("experiment", "")),
            grid=grid,
            datum=datum,
            n_list=n_list,
            stepper=stepper,
            bounds=bounds,
            output_dir=d.get("output_dir"),
            seed=int(d.get("seed", 0)),
            epsilons=tuple(float(e) for e in d.get("epsilons", ExperimentConfig.epsilons)),
            resolution_check=bool(d.get("resolution_check", False)),
            gn_constant=float(d.get("gn_constant", 1.0)),
            raw=d,
        )
    except (ConfigError, InputError):
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"config: {exc}") from exc


def load_config(path, experiment: str | None = None, seed: int | None = None) -> ExperimentConfig:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read ({exc.strerror})") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML ({exc})") from exc
    return from_mapping(data or {}, experiment, seed)
