"""System models and fixed-step Euler propagation of control segments.

Dynamics ``f(x, u)`` and running cost ``g(x, u)`` operate on arrays with
arbitrary leading batch dimensions (``x[..., n]``, ``u[..., m]``), which lets
the planner roll out every child of a node in one call. Only elementwise
numpy operations are used so a batched rollout and a single-row rollout
produce bit-identical numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .signal_tree import Signal

Dynamics = Callable[[np.ndarray, np.ndarray], np.ndarray]
RunningCost = Callable[[np.ndarray, np.ndarray], np.ndarray]


class NumericalFailure(RuntimeError):
    """A rollout produced a non-finite state or derivative."""

    def __init__(self, message: str, step: int):
        super().__init__(f"{message} at Euler step {step}")
        self.step = step


# -- input sets --------------------------------------------------------------


@dataclass(frozen=True)
class InputBox:
    """Axis-aligned box ``lo <= u <= hi``; a 1-D box is an interval.

    The grid has ``R`` endpoint-inclusive points per axis, or ``R + 1`` (step
    ``(hi - lo) / R``) when ``extra_point`` is set.
    """

    lo: tuple
    hi: tuple
    extra_point: bool = False

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or not all(a <= b for a, b in zip(self.lo, self.hi)):
            raise ValueError(f"bad box bounds {self.lo} / {self.hi}")

    @property
    def dim(self) -> int:
        return len(self.lo)

    def contains(self, u, tol: float = 1e-12) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        lo, hi = np.asarray(self.lo), np.asarray(self.hi)
        return np.all((u >= lo - tol) & (u <= hi + tol), axis=-1)

    def grid(self, R: int) -> np.ndarray:
        axes = []
        count = R + 1 if self.extra_point else R
        for a, b in zip(self.lo, self.hi):
            if count == 1:
                axes.append(np.array([0.5 * (a + b)]))
            else:
                i = np.arange(count)
                pts = (a * (count - 1 - i) + b * i) / (count - 1)
                pts[0], pts[-1] = a, b
                axes.append(pts)
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def uniform(self, rng: np.random.Generator, k: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size=(k, self.dim))


@dataclass(frozen=True)
class InputSphere:
    """Sphere ``||u||_2 == radius``. Only the circle (dim 2) is sampled."""

    dim: int
    radius: float = 1.0

    def contains(self, u, tol: float = 1e-12) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return np.abs(np.linalg.norm(u, axis=-1) - self.radius) <= tol

    def grid(self, R: int) -> np.ndarray:
        if self.dim != 2:
            raise ValueError(f"sampling not supported for a {self.dim}-sphere")
        k = R**2
        ang = 2.0 * np.pi * np.arange(k) / k
        return self.radius * np.stack([np.cos(ang), np.sin(ang)], axis=-1)

    def uniform(self, rng: np.random.Generator, k: int) -> np.ndarray:
        v = rng.normal(size=(k, self.dim))
        return self.radius * v / np.linalg.norm(v, axis=-1, keepdims=True)


@dataclass(frozen=True)
class InputBall:
    """Closed ball ``||u||_2 <= radius``. Sampled for dim 3."""

    dim: int
    radius: float = 1.0

    def contains(self, u, tol: float = 1e-12) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return np.linalg.norm(u, axis=-1) <= self.radius + tol

    def grid(self, R: int) -> np.ndarray:
        if self.dim != 3:
            raise ValueError(f"sampling not supported for a {self.dim}-ball")
        # product grid in (radius, polar, azimuth); radii exclude 0 and include
        # the boundary, polar angles sit at cell midpoints so no pole repeats
        r = self.radius * np.arange(1, R + 1) / R
        polar = np.pi * (np.arange(R) + 0.5) / R
        azim = 2.0 * np.pi * np.arange(R) / R
        rr, pp, aa = np.meshgrid(r, polar, azim, indexing="ij")
        pts = np.stack(
            [rr * np.sin(pp) * np.cos(aa), rr * np.sin(pp) * np.sin(aa), rr * np.cos(pp)],
            axis=-1,
        ).reshape(-1, 3)
        # guard against sin/cos rounding pushing a boundary point outside
        norms = np.linalg.norm(pts, axis=-1, keepdims=True)
        scale = np.where(norms > self.radius, self.radius / norms, 1.0)
        return pts * scale

    def uniform(self, rng: np.random.Generator, k: int) -> np.ndarray:
        v = rng.normal(size=(k, self.dim))
        v /= np.linalg.norm(v, axis=-1, keepdims=True)
        return self.radius * v * rng.uniform(size=(k, 1)) ** (1.0 / self.dim)


InputSet = Union[InputBox, InputSphere, InputBall]


@dataclass(frozen=True)
class SystemModel:
    """Dynamics, running cost, input set and the Lipschitz data the planner needs.

    ``L_f``, ``L_g`` and ``M`` are the constants of the standing assumptions,
    declared over the model's operating region.
    """

    name: str
    state_dim: int
    input_dim: int
    f: Dynamics
    g: RunningCost
    omega: InputSet
    L_f: float
    L_g: float
    M: float
    u_max: float


# -- propagation ---------------------------------------------------------------


def num_steps(tau: float, delta_max: float) -> int:
    """``ceil(tau / delta_max)``, treating ratios within 1e-9 of an integer as exact."""
    if tau <= 0 or delta_max <= 0:
        raise ValueError("tau and delta_max must be positive")
    return max(1, math.ceil(tau / delta_max - 1e-9))


@dataclass(frozen=True)
class SegmentResult:
    terminal_state: np.ndarray
    times: np.ndarray
    states: np.ndarray
    segment_cost: float

    @property
    def samples(self) -> list:
        return list(zip(self.times.tolist(), self.states))


@dataclass(frozen=True)
class BatchResult:
    terminal: np.ndarray  # (k, n)
    costs: np.ndarray  # (k,)
    feasible: Optional[np.ndarray]  # (k,) or None when no free-space test was given
    states: Optional[np.ndarray]  # (k, N+1, n) when samples are kept
    dt: float
    steps: int


def _live(ok):
    return slice(None) if ok is None else ok


def propagate_batch(
    system: SystemModel,
    x0,
    controls,
    tau: float,
    delta_max: float,
    free: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    keep_samples: bool = False,
) -> BatchResult:
    """Euler-integrate one constant control per row for ``tau`` seconds.

    ``x0`` is a single state shared by all rows or one state per row. When
    ``free`` is given every integration sample, both endpoints included, is
    tested and the conjunction is returned as ``feasible``; a row stops
    integrating at its first sample outside free space, and only rows still
    feasible can raise :class:`NumericalFailure`.
    """
    u = np.atleast_2d(np.asarray(controls, dtype=float))
    k = u.shape[0]
    N = num_steps(tau, delta_max)
    dt = tau / N
    x = np.array(np.broadcast_to(np.asarray(x0, dtype=float), (k, system.state_dim)))
    if not np.all(np.isfinite(x)):
        raise NumericalFailure("non-finite initial state", 0)
    cost = np.zeros(k)
    ok = np.asarray(free(x), dtype=bool).copy() if free is not None else None
    states = [x] if keep_samples else None
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(N):
            dx = system.f(x, u)
            if not np.isfinite(dx).all() and not np.isfinite(dx[_live(ok)]).all():
                raise NumericalFailure("non-finite state derivative", step)
            step_cost = cost + dt * system.g(x, u)
            x_next = x + dt * dx
            if not np.isfinite(x_next).all() and not np.isfinite(x_next[_live(ok)]).all():
                raise NumericalFailure("non-finite state", step + 1)
            if ok is None or ok.all():
                x, cost = x_next, step_cost
            else:
                # rows that already left free space are frozen: their values
                # no longer matter and must not overflow
                x = np.where(ok[:, None], x_next, x)
                cost = np.where(ok, step_cost, cost)
            if ok is not None:
                ok &= free(x)
            if states is not None:
                states.append(x)
    return BatchResult(
        terminal=x,
        costs=cost,
        feasible=ok,
        states=np.stack(states, axis=1) if states is not None else None,
        dt=dt,
        steps=N,
    )


def propagate(system: SystemModel, x0, u, tau: float, delta_max: float) -> SegmentResult:
    """Single-segment rollout with left-endpoint cost quadrature."""
    if tau <= 0 or delta_max <= 0:
        raise ValueError("tau and delta_max must be positive")
    res = propagate_batch(system, x0, np.asarray(u, dtype=float).reshape(1, -1), tau, delta_max, keep_samples=True)
    times = np.arange(res.steps + 1) * res.dt
    return SegmentResult(res.terminal[0].copy(), times, res.states[0].copy(), float(res.costs[0]))


@dataclass(frozen=True)
class Trajectory:
    """Sampled rollout of a whole signal.

    ``controls[i]`` is the input held from ``times[i]`` to ``times[i+1]``; the
    last row repeats the final input.
    """

    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray

    @property
    def duration(self) -> float:
        return float(self.times[-1]) if len(self.times) else 0.0


def simulate(system: SystemModel, x0, signal: Signal, delta_max: float):
    """Roll out ``signal`` segment by segment. Returns ``(trajectory, cost)``.

    The per-segment arithmetic is the planner's, so terminal states match the
    tree bit for bit.
    """
    x = np.asarray(x0, dtype=float).copy()
    tau = signal.segment_duration
    if len(signal) == 0:
        return Trajectory(np.zeros(1), x[None, :], np.zeros((1, system.input_dim))), 0.0
    N = num_steps(tau, delta_max)
    times, states, controls = [0.0], [x], []
    cost = 0.0
    for i, u in enumerate(signal.controls):
        seg = propagate(system, x, u, tau, delta_max)
        cost = cost + seg.segment_cost
        base = i * tau
        times.extend((base + seg.times[1:]).tolist())
        states.extend(seg.states[1:])
        controls.extend([np.asarray(u, dtype=float)] * N)
        x = seg.terminal_state
    controls.append(controls[-1])
    return Trajectory(np.asarray(times), np.asarray(states), np.asarray(controls)), cost


def sample_controls(system: SystemModel, R: int) -> np.ndarray:
    """Deterministic ``R**m`` point subset of the input set, shape ``(R**m, m)``.

    A box flagged ``extra_point`` yields ``(R + 1)**m`` points instead.
    """
    if R < 1:
        raise ValueError("R must be >= 1")
    omega = system.omega
    if not isinstance(omega, (InputBox, InputSphere, InputBall)):
        raise ValueError(f"unsupported input set {omega!r}")
    pts = omega.grid(R)
    per_axis = R + 1 if getattr(omega, "extra_point", False) else R
    if pts.shape != (per_axis**system.input_dim, system.input_dim):
        raise ValueError(f"input set dimension does not match system input_dim {system.input_dim}")
    return pts
