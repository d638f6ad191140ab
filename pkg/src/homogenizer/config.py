"""Strict JSON experiment configs.

Unknown keys are rejected and every error names the offending field. A
parsed config serializes back to a canonical dict with all defaults filled.

Example::

    {"experiment": "gap-curve",
     "init": {"kind": "perturbed_ghz", "alpha": 0.3},
     "grid_points": 60, "seed": 7}
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

from .channels import ETA_MAX
from .dynamics import GAUSSIAN_STD_DEFAULT, EtaSchedule, ScheduleKind
from .errors import PreconditionError
from .states import ReservoirInit, ReservoirKind

EXPERIMENTS = ("converge", "gap-curve", "crossing", "regimes")
SEED_MAX = 2**64 - 1


class ConfigError(ValueError):
    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


def _number(value, name: str, lo: float | None = None, hi: float | None = None) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", name)
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError("must be finite", name)
    if (lo is not None and value < lo) or (hi is not None and value > hi):
        raise ConfigError(f"{value} outside [{lo}, {hi}]", name)
    return value


def _integer(value, name: str, lo: int | None = None, hi: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"expected an integer, got {value!r}", name)
    if (lo is not None and value < lo) or (hi is not None and value > hi):
        raise ConfigError(f"{value} outside [{lo}, {hi}]", name)
    return value


def _bloch(value, name: str) -> tuple[float, float, float]:
    if not isinstance(value, list) or len(value) != 3:
        raise ConfigError("expected a Bloch vector [x, y, z]", name)
    r = tuple(_number(c, f"{name}[{i}]") for i, c in enumerate(value))
    if sum(c * c for c in r) > 1 + 1e-12:
        raise ConfigError("Bloch vector must have length <= 1", name)
    return r


def _object(value, name: str, allowed: set[str]) -> dict:
    if not isinstance(value, dict):
        raise ConfigError("expected an object", name)
    unknown = sorted(set(value) - allowed)
    if unknown:
        raise ConfigError(f"unknown field(s) {unknown}", f"{name}.{unknown[0]}" if name else unknown[0])
    return value


_INIT_KEYS = {"kind", "n_qubits", "xi", "alpha", "site", "bell_pair"}
_ETA_KEYS = {"kind", "value", "mean", "lo", "hi", "std"}
_TOP_KEYS = {"experiment", "init", "system", "n_steps", "eta", "grid", "grid_points",
             "n_trajectories", "fiducial", "seed", "out_dir"}


def _parse_init(d: dict, default_n: int) -> ReservoirInit:
    _object(d, "init", _INIT_KEYS)
    if "kind" not in d:
        raise ConfigError("missing required field", "init.kind")
    try:
        kind = ReservoirKind(d["kind"])
    except ValueError:
        raise ConfigError(f"unknown kind {d['kind']!r}; expected one of "
                          f"{[k.value for k in ReservoirKind]}", "init.kind") from None
    kw: dict[str, Any] = {"kind": kind, "n_qubits": _integer(d.get("n_qubits", default_n), "init.n_qubits", 1, 10)}
    if "xi" in d:
        kw["xi"] = _bloch(d["xi"], "init.xi")
    if "alpha" in d:
        kw["alpha"] = _number(d["alpha"], "init.alpha", 0.0, 1.0)
    if "site" in d:
        kw["site"] = _integer(d["site"], "init.site", 1)
    if "bell_pair" in d:
        bp = d["bell_pair"]
        if not isinstance(bp, list) or len(bp) != 2:
            raise ConfigError("expected two ancilla labels", "init.bell_pair")
        kw["bell_pair"] = tuple(_integer(c, f"init.bell_pair[{i}]", 1)
                                for i, c in enumerate(bp))
    try:
        return ReservoirInit(**kw)
    except PreconditionError as exc:
        raise ConfigError(str(exc), "init") from None


def _parse_eta(d: dict) -> EtaSchedule:
    _object(d, "eta", _ETA_KEYS)
    try:
        kind = ScheduleKind(d.get("kind", "fixed"))
    except ValueError:
        raise ConfigError(f"unknown kind {d.get('kind')!r}", "eta.kind") from None
    allowed = {ScheduleKind.FIXED: {"kind", "value"},
               ScheduleKind.UNIFORM: {"kind", "lo", "hi"},
               ScheduleKind.GAUSSIAN: {"kind", "mean", "std"}}[kind]
    extra = sorted(set(d) - allowed)
    if extra:
        raise ConfigError(f"not valid for {kind.value} schedules", f"eta.{extra[0]}")
    if kind is ScheduleKind.FIXED:
        return EtaSchedule.fixed(_number(d.get("value", math.pi / 4), "eta.value", 0.0, ETA_MAX))
    if kind is ScheduleKind.UNIFORM:
        lo = _number(d.get("lo", 0.0), "eta.lo", 0.0, ETA_MAX)
        hi = _number(d.get("hi", ETA_MAX), "eta.hi", lo, ETA_MAX)
        return EtaSchedule.uniform(0, lo, hi)
    return EtaSchedule.gaussian(_number(d.get("mean", math.pi / 4), "eta.mean", 0.0, ETA_MAX), 0,
                                _number(d.get("std", GAUSSIAN_STD_DEFAULT), "eta.std", 0.0, None))


def _eta_dict(s: EtaSchedule) -> dict:
    if s.kind is ScheduleKind.FIXED:
        return {"kind": "fixed", "value": s.value}
    if s.kind is ScheduleKind.UNIFORM:
        return {"kind": "uniform", "lo": s.lo, "hi": s.hi}
    return {"kind": "gaussian", "mean": s.value, "std": s.std}


def _init_dict(i: ReservoirInit) -> dict:
    return {"kind": i.kind.value, "n_qubits": i.n_qubits, "xi": list(i.xi), "alpha": i.alpha,
            "site": i.site, "bell_pair": list(i.bell_pair)}


_DEFAULTS = {
    "converge": {"init": {"kind": "product", "n_qubits": 4, "xi": [0.5, 0.0, 0.5]},
                 "n_steps": 50, "eta": {"kind": "uniform"}, "n_trajectories": 100},
    "gap-curve": {"init": {"kind": "bell"}, "n_steps": 2, "eta": {"kind": "fixed"}},
    "crossing": {"init": {"kind": "bell"}, "n_steps": 2, "eta": {"kind": "fixed"}},
    "regimes": {"init": {"kind": "product", "n_qubits": 1}, "n_steps": 10,
                "eta": {"kind": "fixed"}, "grid": [0.0, 0.25, 0.5, 0.75, 1.0]},
}


@dataclass
class ExperimentConfig:
    experiment: str
    init: ReservoirInit
    n_steps: int
    eta: EtaSchedule
    seed: int = 0
    out_dir: str = "out"
    grid: list[float] | None = None
    grid_points: int = 60
    n_trajectories: int = 1
    system: tuple[float, float, float] = (0.0, 0.0, -1.0)
    fiducial: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "init": _init_dict(self.init),
            "system": list(self.system),
            "n_steps": self.n_steps,
            "eta": _eta_dict(self.eta),
            "grid": None if self.grid is None else list(self.grid),
            "grid_points": self.grid_points,
            "n_trajectories": self.n_trajectories,
            "fiducial": list(self.fiducial),
            "seed": self.seed,
            "out_dir": self.out_dir,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @property
    def schedule(self) -> EtaSchedule:
        """The coupling schedule seeded from the root seed."""
        from dataclasses import replace
        return replace(self.eta, seed=self.seed)


def from_dict(d: Any, experiment: str | None = None) -> ExperimentConfig:
    d = _object(d, "", _TOP_KEYS)
    exp = d.get("experiment", experiment)
    if exp is None:
        raise ConfigError("missing required field", "experiment")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {exp!r}; expected one of {list(EXPERIMENTS)}",
                          "experiment")
    if experiment is not None and exp != experiment:
        raise ConfigError(f"config is for {exp!r} but {experiment!r} was requested", "experiment")
    defaults = _DEFAULTS[exp]

    init_d = d.get("init", defaults["init"])
    init = _parse_init(init_d, default_n=4 if exp == "converge" else 3)
    n_steps = _integer(d.get("n_steps", defaults["n_steps"]), "n_steps", 1, 100000)
    eta = _parse_eta(d.get("eta", defaults["eta"]))

    grid = d.get("grid", defaults.get("grid"))
    if grid is not None:
        if not isinstance(grid, list) or not grid:
            raise ConfigError("expected a non-empty list of numbers", "grid")
        hi = 1.0 if exp == "regimes" else ETA_MAX
        grid = [_number(g, f"grid[{i}]", 0.0, hi) for i, g in enumerate(grid)]
        if exp != "regimes" and any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("eta grid must be strictly increasing", "grid")

    cfg = ExperimentConfig(
        experiment=exp,
        init=init,
        n_steps=n_steps,
        eta=eta,
        seed=_integer(d.get("seed", 0), "seed", 0, SEED_MAX),
        out_dir=d.get("out_dir", "out"),
        grid=grid,
        grid_points=_integer(d.get("grid_points", 60), "grid_points", 2, 100000),
        n_trajectories=_integer(d.get("n_trajectories", defaults.get("n_trajectories", 1)),
                                "n_trajectories", 1, 1000000),
        system=_bloch(d.get("system", [0.0, 0.0, -1.0]), "system"),
        fiducial=_bloch(d.get("fiducial", [0.0, 0.0, 0.0]), "fiducial"),
    )
    if not isinstance(cfg.out_dir, str) or not cfg.out_dir:
        raise ConfigError("expected a non-empty path string", "out_dir")
    if exp in ("gap-curve", "crossing") and init.n_qubits < 3:
        raise ConfigError("the witness needs at least 3 ancillas", "init.n_qubits")
    return cfg


def parse_config(text: str, experiment: str | None = None) -> ExperimentConfig:
    """Parse and validate a JSON config; raises ``ConfigError`` naming the field or line."""
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return from_dict(d, experiment)


def serialize(cfg: ExperimentConfig) -> str:
    return cfg.to_json()
