"""Benchmark systems and the problem definitions built around them.

Dynamics live here as code ("families"); initial states, environments,
planner scaling formulas and sweeps live in YAML definitions shipped under
``glc/configs``. A definition with the same schema can be given inline in a
CLI run config, so new environments need no code as long as the dynamics are
one of the built-in families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
import yaml

from .dynamics import InputBall, InputBox, InputSphere, SystemModel
from .environment import Region, free_space, goal_union, primitive_from_dict
from .planner import PlannerParams, Problem

SQRT50 = math.sqrt(50.0)


class ConfigError(ValueError):
    """A benchmark definition or run config is malformed."""


# -- dynamics ------------------------------------------------------------------


def _min_time_cost(x, u):
    return np.ones(np.shape(x)[:-1])


def _single_integrator_f(x, u):
    return np.broadcast_to(u, np.shape(x)).copy()


def single_integrator() -> SystemModel:
    return SystemModel(
        name="single_integrator",
        state_dim=2,
        input_dim=2,
        f=_single_integrator_f,
        g=_min_time_cost,
        omega=InputSphere(2, 1.0),
        L_f=0.0,
        L_g=0.0,
        M=1.0,
        u_max=1.0,
    )


def _pendulum_f(x, u):
    theta, omega = x[..., 0], x[..., 1]
    return np.stack([omega, u[..., 0] - np.sin(theta)], axis=-1)


def pendulum_system() -> SystemModel:
    # M holds on the operating band |omega| <= 3: sqrt(3**2 + 1.2**2) < 3.25
    return SystemModel(
        name="pendulum",
        state_dim=2,
        input_dim=1,
        f=_pendulum_f,
        g=_min_time_cost,
        omega=InputBox((-0.2,), (0.2,)),
        L_f=1.0,
        L_g=0.0,
        M=3.25,
        u_max=0.2,
    )


@dataclass(frozen=True)
class AcrobotParams:
    m1: float = 1.0
    m2: float = 1.0
    l1: float = 1.0
    lc1: float = 0.5
    lc2: float = 0.5
    I1: float = 1.0 / 12.0
    I2: float = 1.0 / 12.0
    gravity: float = 9.8


@dataclass(frozen=True)
class _AcrobotDynamics:
    """Spong's acrobot, torque at the elbow. ``q1`` is measured from hanging
    straight down, ``q2`` is the elbow angle relative to the first link."""

    p: AcrobotParams

    def __call__(self, x, u):
        p = self.p
        q1, q2, dq1, dq2 = x[..., 0], x[..., 1], x[..., 2], x[..., 3]
        tau = u[..., 0]
        s2, c2 = np.sin(q2), np.cos(q2)
        d1 = p.m1 * p.lc1**2 + p.m2 * (p.l1**2 + p.lc2**2 + 2 * p.l1 * p.lc2 * c2) + p.I1 + p.I2
        d2 = p.m2 * (p.lc2**2 + p.l1 * p.lc2 * c2) + p.I2
        phi2 = p.m2 * p.lc2 * p.gravity * np.sin(q1 + q2)
        phi1 = (
            -p.m2 * p.l1 * p.lc2 * dq2**2 * s2
            - 2 * p.m2 * p.l1 * p.lc2 * dq2 * dq1 * s2
            + (p.m1 * p.lc1 + p.m2 * p.l1) * p.gravity * np.sin(q1)
            + phi2
        )
        ddq2 = (tau + d2 / d1 * phi1 - p.m2 * p.l1 * p.lc2 * dq1**2 * s2 - phi2) / (
            p.m2 * p.lc2**2 + p.I2 - d2**2 / d1
        )
        ddq1 = -(d2 * ddq2 + phi1) / d1
        return np.stack([dq1, dq2, ddq1, ddq2], axis=-1)


def acrobot_energy(x, p: AcrobotParams = AcrobotParams()) -> np.ndarray:
    """Total mechanical energy, zero at rest hanging down."""
    x = np.asarray(x, dtype=float)
    q1, q2, dq1, dq2 = x[..., 0], x[..., 1], x[..., 2], x[..., 3]
    c2 = np.cos(q2)
    d11 = p.m1 * p.lc1**2 + p.m2 * (p.l1**2 + p.lc2**2 + 2 * p.l1 * p.lc2 * c2) + p.I1 + p.I2
    d12 = p.m2 * (p.lc2**2 + p.l1 * p.lc2 * c2) + p.I2
    d22 = p.m2 * p.lc2**2 + p.I2
    kinetic = 0.5 * (d11 * dq1**2 + 2 * d12 * dq1 * dq2 + d22 * dq2**2)
    a = (p.m1 * p.lc1 + p.m2 * p.l1) * p.gravity
    b = p.m2 * p.lc2 * p.gravity
    return kinetic + a * (1 - np.cos(q1)) + b * (1 - np.cos(q1 + q2))


def acrobot_system(params: AcrobotParams = AcrobotParams()) -> SystemModel:
    # L_f and M bound the Jacobian norm and |f| on |dq1|, |dq2| <= 6 for the
    # default parameters (numerical sup about 558.3 and 250.4)
    return SystemModel(
        name="acrobot",
        state_dim=4,
        input_dim=1,
        f=_AcrobotDynamics(params),
        g=_min_time_cost,
        omega=InputBox((-4.0,), (4.0,)),
        L_f=600.0,
        L_g=0.0,
        M=260.0,
        u_max=4.0,
    )


def _point_robot_f(x, u):
    v = x[..., 3:6]
    speed = np.sqrt(v[..., 0] * v[..., 0] + v[..., 1] * v[..., 1] + v[..., 2] * v[..., 2])
    acc = 5.0 * u - 0.1 * v * speed[..., None]
    return np.concatenate([v, acc], axis=-1)


def point_robot_system() -> SystemModel:
    # speed stays below sqrt(50); Jacobian norm there is sqrt(1 + (0.2*sqrt(50))**2) = sqrt(3)
    return SystemModel(
        name="point_robot",
        state_dim=6,
        input_dim=3,
        f=_point_robot_f,
        g=_min_time_cost,
        omega=InputBall(3, 1.0),
        L_f=1.75,
        L_g=0.0,
        M=12.25,
        u_max=1.0,
    )


def _wheeled_f(x, u):
    theta = x[..., 2]
    return np.stack([np.cos(theta), np.sin(theta), u[..., 0]], axis=-1)


def _comfort_cost(x, u):
    w = u[..., 0]
    return 1.0 + 2.0 * w * w


def wheeled_robot_min_time_system() -> SystemModel:
    return wheeled_robot_system(min_time=True)


def wheeled_robot_system(min_time: bool = False) -> SystemModel:
    # |d/du (1 + 2u^2)| = |4u| <= 4 on [-1, 1]
    return SystemModel(
        name="wheeled_robot_min_time" if min_time else "wheeled_robot",
        state_dim=3,
        input_dim=1,
        f=_wheeled_f,
        g=_min_time_cost if min_time else _comfort_cost,
        omega=InputBox((-1.0,), (1.0,)),
        L_f=1.0,
        L_g=0.0 if min_time else 4.0,
        M=1.415,
        u_max=1.0,
    )


@dataclass(frozen=True)
class Family:
    build: Callable[[], SystemModel]
    position_axes: Optional[Tuple[int, ...]] = None
    max_speed: Optional[float] = None


FAMILIES: Dict[str, Family] = {
    "single_integrator": Family(single_integrator, (0, 1), 1.0),
    "pendulum": Family(pendulum_system),
    "acrobot": Family(acrobot_system),
    "point_robot": Family(point_robot_system, (0, 1, 2), SQRT50),
    "wheeled_robot": Family(wheeled_robot_system, (0, 1), 1.0),
    "wheeled_robot_min_time": Family(wheeled_robot_min_time_system, (0, 1), 1.0),
}


# -- scaling formulas ------------------------------------------------------------


@dataclass(frozen=True)
class ScaleFormula:
    """``coefficient * R**exponent * (ln R if log)``; rounded up when ``integer``."""

    coefficient: float
    exponent: float = 1.0
    log: bool = False
    integer: bool = False

    def __call__(self, R: int):
        v = self.coefficient * R**self.exponent
        if self.log:
            v *= math.log(R)
        if self.integer:
            return max(1, math.ceil(v))
        return v

    @classmethod
    def from_dict(cls, d, integer: bool = False) -> "ScaleFormula":
        if not isinstance(d, dict) or "coefficient" not in d:
            raise ConfigError(f"formula needs a mapping with 'coefficient', got {d!r}")
        return cls(_number(d["coefficient"]), _number(d.get("exponent", 1.0)), bool(d.get("log", False)), integer)

    def to_dict(self) -> dict:
        return {"coefficient": self.coefficient, "exponent": self.exponent, "log": self.log}


def _number(v) -> float:
    """Float from a number or a ``"p/q"`` string."""
    if isinstance(v, str) and "/" in v:
        num, den = v.split("/", 1)
        return float(num) / float(den)
    try:
        return float(v)
    except (TypeError, ValueError):
        raise ConfigError(f"not a number: {v!r}") from None


# -- benchmark configs -------------------------------------------------------------


@dataclass(frozen=True)
class OperatingRegion:
    """State box, optionally with a norm cap on some coordinates, for Lipschitz sampling."""

    lo: Tuple[float, ...]
    hi: Tuple[float, ...]
    norm_axes: Optional[Tuple[int, ...]] = None
    norm_max: Optional[float] = None

    def accepts(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        ok = np.all((x >= self.lo) & (x <= self.hi), axis=-1)
        if self.norm_axes is not None:
            ok &= np.linalg.norm(x[..., list(self.norm_axes)], axis=-1) <= self.norm_max
        return ok

    def sample(self, rng: np.random.Generator, k: int) -> np.ndarray:
        out = []
        while sum(len(a) for a in out) < k:
            x = rng.uniform(self.lo, self.hi, size=(2 * k, len(self.lo)))
            out.append(x[self.accepts(x)])
        return np.concatenate(out)[:k]


@dataclass(frozen=True)
class BenchmarkConfig:
    name: str
    family: str
    system: SystemModel
    problem: Problem
    c: float
    eta_formula: ScaleFormula
    horizon_formula: ScaleFormula
    delta_max: float
    resolution_sweep: Tuple[int, ...]
    use_heuristic: bool
    goal_region: Region
    free_region: Region
    operating_region: Optional[OperatingRegion] = None
    definition: dict = field(default_factory=dict, repr=False)

    def eta(self, R: int) -> float:
        return self.eta_formula(R)

    def horizon(self, R: int) -> int:
        return self.horizon_formula(R)

    def heuristic(self):
        """Distance to the goal over the family's top speed, or None if unavailable."""
        fam = FAMILIES[self.family]
        if fam.max_speed is None or not _goal_on_axes(self.goal_region, fam.position_axes):
            return None
        return GoalDistanceHeuristic(self.goal_region, fam.max_speed)

    def params_for(
        self,
        R: int,
        *,
        use_heuristic: Optional[bool] = None,
        h_override: Optional[int] = None,
        max_expansions: Optional[int] = None,
    ) -> PlannerParams:
        use = self.use_heuristic if use_heuristic is None else use_heuristic
        h = None
        if use:
            h = self.heuristic()
            if h is None:
                raise ConfigError(f"{self.name}: no admissible heuristic for this goal")
        return PlannerParams(
            R=int(R),
            c=self.c,
            eta=self.eta(R),
            horizon=int(h_override) if h_override is not None else self.horizon(R),
            delta_max=self.delta_max,
            heuristic=h,
            max_expansions=max_expansions,
        )


@dataclass(frozen=True)
class GoalDistanceHeuristic:
    goal: Region
    max_speed: float

    def __call__(self, x) -> float:
        return max(0.0, -float(self.goal.clearance(x))) / self.max_speed


def _goal_on_axes(region: Region, axes) -> bool:
    from .environment import Ball, Box, Union

    if axes is None:
        return False
    if isinstance(region, Union):
        return all(_goal_on_axes(p, axes) for p in region.parts)
    if isinstance(region, (Ball, Box)):
        return region.axes is not None and set(region.axes) <= set(axes)
    return False


def _floats(v, what: str) -> Tuple[float, ...]:
    try:
        return tuple(float(a) for a in v)
    except (TypeError, ValueError):
        raise ConfigError(f"{what}: expected a list of numbers, got {v!r}") from None


def benchmark_from_dict(d: dict, name: Optional[str] = None) -> BenchmarkConfig:
    """Build a :class:`BenchmarkConfig` from a definition mapping (see ``glc/configs``)."""
    if not isinstance(d, dict):
        raise ConfigError("benchmark definition must be a mapping")
    try:
        family = d["family"]
        fam = FAMILIES[family]
    except KeyError:
        raise ConfigError(f"unknown or missing family {d.get('family')!r}; known: {sorted(FAMILIES)}") from None
    system = fam.build()
    grid = d.get("input_grid", "per_resolution")
    if grid == "per_resolution_plus_one":
        if not isinstance(system.omega, InputBox):
            raise ConfigError("input_grid per_resolution_plus_one needs a box input set")
        system = replace(system, omega=replace(system.omega, extra_point=True))
    elif grid != "per_resolution":
        raise ConfigError(f"unknown input_grid {grid!r}")
    x_ic = np.asarray(_floats(d.get("x_ic", ()), "x_ic"))
    if x_ic.shape != (system.state_dim,):
        raise ConfigError(f"x_ic must have {system.state_dim} entries")
    env = d.get("environment") or {}
    try:
        bounds = primitive_from_dict({"box": env["bounds"]}) if env.get("bounds") else None
        obstacles = [primitive_from_dict(o) for o in env.get("obstacles") or []]
        goal = goal_union([primitive_from_dict(g) for g in env.get("goal") or []])
    except ValueError as e:
        raise ConfigError(str(e)) from None
    free = free_space(bounds, obstacles)
    planner = d.get("planner") or {}
    try:
        c = _number(planner["c"])
        eta = ScaleFormula.from_dict(planner["eta"])
        horizon = ScaleFormula.from_dict(planner["horizon"], integer=True)
        delta_max = _number(planner["delta_max"])
    except KeyError as e:
        raise ConfigError(f"planner section missing {e}") from None
    if c <= 0 or delta_max <= 0:
        raise ConfigError("c and delta_max must be positive")
    sweep = tuple(int(r) for r in d.get("resolutions") or ())
    region = None
    if d.get("operating_region"):
        o = d["operating_region"]
        region = OperatingRegion(
            _floats(o["lo"], "operating_region.lo"),
            _floats(o["hi"], "operating_region.hi"),
            tuple(o["norm_axes"]) if o.get("norm_axes") else None,
            _number(o["norm_max"]) if o.get("norm_max") is not None else None,
        )
    if not bool(free(x_ic)):
        raise ConfigError("x_ic is not in free space")
    return BenchmarkConfig(
        name=name or d.get("name") or family,
        family=family,
        system=system,
        problem=Problem(system, x_ic, free, goal),
        c=c,
        eta_formula=eta,
        horizon_formula=horizon,
        delta_max=delta_max,
        resolution_sweep=sweep,
        use_heuristic=bool(planner.get("heuristic", False)),
        goal_region=goal,
        free_region=free,
        operating_region=region,
        definition=d,
    )


BUILTIN = ("shortest_path", "pendulum", "acrobot", "point_robot_3d", "wheeled_robot", "wheeled_robot_min_time")


def builtin_definition(name: str) -> dict:
    if name not in BUILTIN:
        raise ConfigError(f"unknown benchmark {name!r}; known: {', '.join(BUILTIN)}")
    text = resources.files("glc").joinpath("configs", f"{name}.yaml").read_text()
    return yaml.safe_load(text)


def load_benchmark(name: str) -> BenchmarkConfig:
    return benchmark_from_dict(builtin_definition(name), name)


def shortest_path() -> BenchmarkConfig:
    return load_benchmark("shortest_path")


def pendulum() -> BenchmarkConfig:
    return load_benchmark("pendulum")


def acrobot() -> BenchmarkConfig:
    return load_benchmark("acrobot")


def point_robot_3d() -> BenchmarkConfig:
    return load_benchmark("point_robot_3d")


def wheeled_robot(min_time: bool = False) -> BenchmarkConfig:
    return load_benchmark("wheeled_robot_min_time" if min_time else "wheeled_robot")


def all_benchmarks() -> Sequence[BenchmarkConfig]:
    return [load_benchmark(n) for n in BUILTIN]
