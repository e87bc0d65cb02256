"""Verification tooling that shares no search logic with the planner.

* :func:`exhaustive_best` enumerates every control sequence below a depth
  limit and returns the cheapest one that reaches the goal, optionally with a
  clearance margin around the trajectory and inside the goal.
* :func:`signal_distance` and :func:`trajectory_distance` are the metrics on
  signals and on sampled trajectories.
* :func:`check_ic_sensitivity` compares two rollouts of one signal from
  nearby initial states against the exponential growth bounds.
* :func:`estimate_lipschitz` samples finite-difference ratios to check the
  declared constants of a :class:`~glc.dynamics.SystemModel`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .dynamics import SystemModel, Trajectory, propagate_batch, sample_controls, simulate
from .planner import PlannerParams, Problem
from .signal_tree import Signal

ENUMERATION_BUDGET = 10**7


class EnumerationBudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    best_cost: float
    best_signal: Optional[Signal]
    signals_enumerated: int
    clearance: float


def epsilon_bound(params: PlannerParams, system: SystemModel) -> float:
    """Clearance margin up to which the planner is guaranteed to do at least as well.

    ``R sqrt(n) / (L_f eta) * (exp(L_f h / R) - 1)``, with the ``L_f -> 0``
    limit ``sqrt(n) h / eta``.
    """
    root_n = math.sqrt(system.state_dim)
    if system.L_f == 0:
        return root_n * params.horizon / params.eta
    try:
        growth = math.expm1(system.L_f * params.horizon / params.R)
    except OverflowError:
        return math.inf
    return params.R * root_n / (system.L_f * params.eta) * growth


def _inside(region, states: np.ndarray, margin: float) -> np.ndarray:
    if margin == 0:
        return np.asarray(region(states), dtype=bool)
    if not hasattr(region, "clearance"):
        raise TypeError("a positive clearance needs regions that expose clearance()")
    return np.asarray(region.clearance(states) >= margin, dtype=bool)


def exhaustive_best(
    problem: Problem,
    R: int,
    c: float,
    delta_max: float,
    depth_limit: int,
    clearance: float = 0.0,
    budget: int = ENUMERATION_BUDGET,
) -> OracleResult:
    """Brute-force minimum cost over all signals with fewer than ``depth_limit`` segments.

    Signals of depth ``0 .. depth_limit - 1`` are enumerated, which is the
    set the planner searches when its depth limit equals ``depth_limit``.
    Rollouts use the planner's integrator, so costs agree bit for bit. With
    ``clearance > 0`` a signal counts only if every integration sample keeps
    that much clearance inside free space and the final state has that much
    clearance inside the goal.
    """
    if clearance < 0:
        raise ValueError("clearance must be nonnegative")
    if depth_limit < 1:
        raise ValueError("depth_limit must be >= 1")
    system = problem.system
    controls = sample_controls(system, R)
    k = len(controls)
    if float(k) ** depth_limit > budget:
        raise EnumerationBudgetExceeded(
            f"{k}**{depth_limit} signals exceed the enumeration budget of {budget}; use a smaller R or depth"
        )
    tau = c / R
    x_ic = np.asarray(problem.x_ic, dtype=float)
    if math.isinf(clearance):
        return OracleResult(math.inf, None, 0, clearance)

    best_cost = math.inf
    best_seq: Optional[Tuple[int, ...]] = None
    enumerated = 0

    # the empty signal
    enumerated += 1
    if _inside(problem.free, x_ic, clearance) and _inside(problem.goal, x_ic, clearance):
        best_cost, best_seq = 0.0, ()

    # stack of (state, cost, sequence); children of each entry are rolled out together
    stack = [(x_ic, 0.0, ())] if bool(_inside(problem.free, x_ic, clearance)) else []
    while stack:
        x, cost, seq = stack.pop()
        if len(seq) + 1 >= depth_limit:
            continue
        batch = propagate_batch(system, x, controls, tau, delta_max, keep_samples=True)
        ok = np.all(_inside(problem.free, batch.states, clearance), axis=1)
        at_goal = _inside(problem.goal, batch.terminal, clearance)
        costs = (cost + batch.costs).tolist()
        for i in range(k):
            enumerated += 1
            if not ok[i]:
                continue
            child = seq + (i,)
            if at_goal[i] and costs[i] < best_cost:
                best_cost, best_seq = costs[i], child
            stack.append((batch.terminal[i], costs[i], child))

    signal = None
    if best_seq is not None:
        signal = Signal(tuple(controls[i].copy() for i in best_seq), tau)
    return OracleResult(best_cost, signal, enumerated, clearance)


# -- metrics -----------------------------------------------------------------------


def signal_distance(u1: Signal, u2: Signal, u_max: float) -> float:
    """Integrated input gap over the shared time span plus ``u_max`` times the length gap."""
    t1, t2 = u1.duration, u2.duration
    common = min(t1, t2)
    cuts = {0.0, common}
    for s in (u1, u2):
        cuts.update(i * s.segment_duration for i in range(1, len(s)) if i * s.segment_duration < common)
    cuts = sorted(cuts)
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b <= a:
            continue
        mid = 0.5 * (a + b)
        gap = np.asarray(u1.value_at(mid), float) - np.asarray(u2.value_at(mid), float)
        total += float(np.linalg.norm(gap)) * (b - a)
    return total + u_max * abs(t1 - t2)


def _as_samples(x) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(x, Trajectory):
        return np.asarray(x.times, float), np.asarray(x.states, float)
    times, states = x
    return np.asarray(times, float), np.asarray(states, float)


def trajectory_distance(x1, x2, M: float, rtol: float = 1e-9) -> float:
    """Largest pointwise state gap over the shared samples plus ``M`` times the duration gap.

    Each argument is a :class:`~glc.dynamics.Trajectory` or a ``(times,
    states)`` pair. The shorter one's sample times must be a prefix of the
    longer one's.
    """
    ta, xa = _as_samples(x1)
    tb, xb = _as_samples(x2)
    if len(ta) == 0 or len(tb) == 0:
        raise ValueError("empty trajectory")
    n = min(len(ta), len(tb))
    scale = max(1.0, abs(ta[-1]), abs(tb[-1]))
    if not np.allclose(ta[:n], tb[:n], rtol=0.0, atol=rtol * scale):
        raise ValueError("trajectories are not sampled on a common grid")
    gap = float(np.max(np.linalg.norm(xa[:n] - xb[:n], axis=-1)))
    return gap + M * abs(float(ta[-1]) - float(tb[-1]))


# -- sensitivity to the initial state ------------------------------------------------


@dataclass(frozen=True)
class SensitivityReport:
    lhs_state: float
    bound_state: float
    lhs_cost: float
    bound_cost: float

    def holds(self, tolerance: float = 0.0) -> bool:
        return self.lhs_state <= self.bound_state + tolerance and self.lhs_cost <= self.bound_cost + tolerance


def sensitivity_bounds(system: SystemModel, gap: float, duration: float) -> Tuple[float, float]:
    """``(state bound, cost bound)`` for two rollouts whose initial states are ``gap`` apart."""
    if system.L_f == 0:
        return gap, system.L_g * duration * gap
    try:
        growth = math.expm1(system.L_f * duration)
    except OverflowError:
        growth = math.inf
    cost = 0.0 if system.L_g == 0 else gap * system.L_g / system.L_f * growth
    return gap * (growth + 1.0), cost


def check_ic_sensitivity(system: SystemModel, u: Signal, x0, z0, delta_max: float) -> SensitivityReport:
    x0 = np.asarray(x0, dtype=float)
    z0 = np.asarray(z0, dtype=float)
    traj_x, cost_x = simulate(system, x0, u, delta_max)
    traj_z, cost_z = simulate(system, z0, u, delta_max)
    lhs_state = float(np.max(np.linalg.norm(traj_x.states - traj_z.states, axis=-1)))
    bound_state, bound_cost = sensitivity_bounds(system, float(np.linalg.norm(x0 - z0)), u.duration)
    return SensitivityReport(lhs_state, bound_state, abs(cost_x - cost_z), bound_cost)


# -- Lipschitz constants ---------------------------------------------------------------


@dataclass(frozen=True)
class LipschitzEstimate:
    L_f_est: float
    L_g_est: float
    M_est: float


def estimate_lipschitz(
    system: SystemModel,
    num_samples: int,
    region,
    rng: Optional[np.random.Generator] = None,
    step: float = 1e-4,
) -> LipschitzEstimate:
    """Largest sampled finite-difference ratios over ``region``.

    ``region`` is anything with ``sample(rng, k)`` returning states (see
    :class:`glc.domains.OperatingRegion`). Half the pairs are close
    neighbours, which approximate the Jacobian norm; the other half are
    independent draws, which catch nonlocal growth.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    k = int(num_samples)
    if k < 1:
        raise ValueError("num_samples must be positive")
    x = region.sample(rng, k)
    u = system.omega.uniform(rng, k)
    near = k // 2
    dx = rng.normal(size=x.shape)
    dx *= step / np.linalg.norm(dx, axis=-1, keepdims=True)
    y = np.concatenate([x[:near] + dx[:near], region.sample(rng, k - near)])
    du = rng.normal(size=u.shape)
    du *= step / np.linalg.norm(du, axis=-1, keepdims=True)
    v = np.concatenate([np.clip(u[:near] + du[:near], -system.u_max, system.u_max), system.omega.uniform(rng, k - near)])
    if hasattr(system.omega, "radius"):
        # keep perturbed inputs inside a ball or sphere
        norms = np.linalg.norm(v, axis=-1, keepdims=True)
        v = np.where(norms > system.omega.radius, v * system.omega.radius / norms, v)

    fx = system.f(x, u)
    fy = system.f(y, u)
    sep = np.linalg.norm(x - y, axis=-1)
    keep = sep > 0
    L_f = float(np.max(np.linalg.norm(fx - fy, axis=-1)[keep] / sep[keep], initial=0.0))
    M = float(np.max(np.linalg.norm(fx, axis=-1)))

    gx = np.asarray(system.g(x, u), float)
    gy = np.asarray(system.g(y, v), float)
    joint = np.sqrt(sep**2 + np.sum((u - v) ** 2, axis=-1))
    keep = joint > 0
    L_g = float(np.max(np.abs(gx - gy)[keep] / joint[keep], initial=0.0))
    return LipschitzEstimate(L_f, L_g, M)


# -- scaling diagnostics -------------------------------------------------------------


def scaling_sequences(system: SystemModel, eta, horizon, resolutions: Sequence[int]):
    """Per-resolution ``(R / h(R), epsilon(R))`` used to inspect the resolution-completeness limits.

    ``eta`` and ``horizon`` are callables of ``R``; epsilon is the clearance
    margin from :func:`epsilon_bound`.
    """
    rows = []
    for R in resolutions:
        h = horizon(R)
        params = PlannerParams(R=int(R), c=1.0, eta=eta(R), horizon=int(h), delta_max=1.0)
        rows.append((R / h, epsilon_bound(params, system)))
    return rows
