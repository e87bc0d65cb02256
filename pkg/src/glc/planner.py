"""Generalized label correcting search over piecewise-constant signals.

The search pops the cheapest signal (plus heuristic) from a priority queue,
returns it if it ends in the goal, and otherwise expands it with every
sampled control. A child is dropped when its rollout leaves free space, when
it reaches the depth limit, or when the label of its partition cell arrived
no later and is cheaper by at least the Lipschitz threshold. Surviving
children are queued; one that is strictly cheaper than the cell label takes
the label over.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from .dynamics import SystemModel, Trajectory, propagate_batch, sample_controls, simulate
from .partition import GridKey, grid_key, grid_keys
from .signal_tree import Signal, SignalNode, SignalTree

Heuristic = Callable[[np.ndarray], float]
StatePredicate = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class PlannerParams:
    R: int
    c: float
    eta: float
    horizon: int
    delta_max: float
    heuristic: Optional[Heuristic] = None
    max_expansions: Optional[int] = None

    def validate(self) -> None:
        if not isinstance(self.R, (int, np.integer)) or self.R < 1:
            raise ValueError(f"R must be a positive integer, got {self.R!r}")
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c}")
        if not (self.eta > 0 and math.isfinite(self.eta)):
            raise ValueError(f"eta must be positive and finite, got {self.eta}")
        if not isinstance(self.horizon, (int, np.integer)) or self.horizon < 1:
            raise ValueError(f"horizon must be an integer >= 1, got {self.horizon!r}")
        if not self.delta_max > 0:
            raise ValueError(f"delta_max must be positive, got {self.delta_max}")
        if self.max_expansions is not None and self.max_expansions < 0:
            raise ValueError("max_expansions must be nonnegative")

    @property
    def segment_duration(self) -> float:
        return self.c / self.R


@dataclass(frozen=True)
class Problem:
    system: SystemModel
    x_ic: np.ndarray
    free: StatePredicate
    goal: StatePredicate


@dataclass
class PlanStats:
    nodes_expanded: int = 0
    nodes_queued: int = 0
    nodes_pruned_glc: int = 0
    nodes_pruned_infeasible: int = 0
    nodes_pruned_depth: int = 0
    labels_created: int = 0
    labels_replaced: int = 0
    wall_time: float = 0.0
    budget_exhausted: bool = False


@dataclass
class PlanOutcome:
    cost: float
    signal: Optional[Signal]
    trajectory: Optional[Trajectory]
    stats: PlanStats
    tree: SignalTree = field(repr=False)
    labels: Dict[GridKey, int] = field(repr=False)
    goal_node: Optional[int] = None

    @property
    def solved(self) -> bool:
        return self.signal is not None


def glc_threshold(params: PlannerParams, system: SystemModel) -> float:
    """Cost margin a label needs over a later arrival before it may prune it."""
    if system.L_g == 0:
        return 0.0
    radius = math.sqrt(system.state_dim) / params.eta
    horizon_time = params.horizon / params.R
    if system.L_f == 0:
        return radius * system.L_g * horizon_time
    try:
        growth = math.expm1(system.L_f * horizon_time)
    except OverflowError:
        return math.inf
    return radius * (system.L_g / system.L_f) * growth


def prunes(incumbent: SignalNode, candidate: SignalNode, threshold: float) -> bool:
    """True when ``incumbent`` dominates ``candidate`` (both assumed in one cell)."""
    return incumbent.terminal_time <= candidate.terminal_time and incumbent.cost + threshold <= candidate.cost


def check_feasible(samples, free: StatePredicate) -> bool:
    """``samples`` is a sequence of ``(time, state)`` pairs or an ``(N, n)`` state array."""
    if isinstance(samples, np.ndarray):
        states = samples
    else:
        samples = list(samples)
        if not samples:
            raise ValueError("no samples to check")
        states = np.asarray([s for _, s in samples], dtype=float)
    if len(states) == 0:
        raise ValueError("no samples to check")
    return bool(np.all(free(states)))


class SearchMonitor:
    """Hooks invoked during :func:`plan`; the base class ignores everything."""

    def on_push(self, node: SignalNode, priority: float) -> None:
        pass

    def on_pop(self, node: SignalNode, priority: float) -> None:
        pass

    def on_label(self, key: GridKey, old: Optional[SignalNode], new: SignalNode) -> None:
        pass

    def on_prune(self, label: SignalNode, key: GridKey, time_: float, cost: float, state: np.ndarray, threshold: float) -> None:
        pass


class InvariantMonitor(SearchMonitor):
    """Re-checks the search invariants as events happen and records violations."""

    def __init__(self, eta: float, zero_heuristic: bool = True):
        self.eta = eta
        self.zero_heuristic = zero_heuristic
        self.violations: List[str] = []
        self.labels: Dict[GridKey, int] = {}
        self.enqueued: set = set()
        self.last_pop = -math.inf
        self.pops = 0
        self.prunes = 0

    def on_push(self, node, priority):
        if node.id in self.enqueued:
            self.violations.append(f"node {node.id} enqueued twice")
        self.enqueued.add(node.id)

    def on_pop(self, node, priority):
        self.pops += 1
        if self.zero_heuristic and node.cost < self.last_pop:
            self.violations.append(f"popped cost {node.cost} after {self.last_pop}")
        self.last_pop = max(self.last_pop, node.cost)

    def on_label(self, key, old, new):
        held = self.labels.get(key)
        if (old.id if old is not None else None) != held:
            self.violations.append(f"cell {key} had label {held}, planner replaced {old and old.id}")
        if old is not None and not new.cost < old.cost:
            self.violations.append(f"cell {key} relabelled without strict decrease ({old.cost} -> {new.cost})")
        if grid_key(new.terminal_state, self.eta) != key:
            self.violations.append(f"label {new.id} filed under wrong cell {key}")
        self.labels[key] = new.id

    def on_prune(self, label, key, time_, cost, state, threshold):
        self.prunes += 1
        if self.labels.get(key) != label.id:
            self.violations.append(f"prune in {key} by non-label {label.id}")
        if grid_key(state, self.eta) != key or grid_key(label.terminal_state, self.eta) != key:
            self.violations.append(f"prune across cells at {key}")
        if not (label.terminal_time <= time_ and label.cost + threshold <= cost):
            self.violations.append(f"prune in {key} without an earlier, cheaper label")


def plan(problem: Problem, params: PlannerParams, monitor: Optional[SearchMonitor] = None) -> PlanOutcome:
    params.validate()
    system = problem.system
    x_ic = np.asarray(problem.x_ic, dtype=float)
    if x_ic.shape != (system.state_dim,):
        raise ValueError(f"x_ic has shape {x_ic.shape}, expected ({system.state_dim},)")
    if not bool(problem.free(x_ic)):
        raise ValueError("initial state is not in free space")

    started = time.perf_counter()
    controls = sample_controls(system, params.R)
    tau = params.segment_duration
    threshold = glc_threshold(params, system)
    heuristic = params.heuristic
    stats = PlanStats()
    tree = SignalTree(params.c, params.R)
    labels: Dict[GridKey, int] = {}
    nodes = tree._nodes  # hot loop reads the arena directly

    root = tree.create_root(x_ic)
    counter = 0
    prio = heuristic(x_ic) if heuristic else 0.0
    queue = [(prio, counter, root)]
    stats.nodes_queued = 1
    if monitor:
        monitor.on_push(nodes[root], prio)

    goal_node = None
    while queue:
        prio, _, nid = heapq.heappop(queue)
        node = nodes[nid]
        if monitor:
            monitor.on_pop(node, prio)
        if bool(problem.goal(node.terminal_state)):
            goal_node = nid
            break
        if params.max_expansions is not None and stats.nodes_expanded >= params.max_expansions:
            stats.budget_exhausted = True
            break
        stats.nodes_expanded += 1

        depth = node.depth + 1
        if depth >= params.horizon:
            stats.nodes_pruned_depth += len(controls)
            continue
        child_time = tree.time_at_depth(depth)
        batch = propagate_batch(system, node.terminal_state, controls, tau, params.delta_max, free=problem.free)
        feasible = batch.feasible.tolist()
        keys = grid_keys(batch.terminal, params.eta).tolist()
        seg_costs = batch.costs
        costs = (node.cost + seg_costs).tolist()

        for i, ok in enumerate(feasible):
            if not ok:
                stats.nodes_pruned_infeasible += 1
                continue
            key = tuple(keys[i])
            cost = costs[i]
            zid = labels.get(key)
            z = nodes[zid] if zid is not None else None
            if z is not None and z.terminal_time <= child_time and z.cost + threshold <= cost:
                stats.nodes_pruned_glc += 1
                if monitor:
                    monitor.on_prune(z, key, child_time, cost, batch.terminal[i], threshold)
                continue
            wid = tree.add_child(nid, controls[i], batch.terminal[i], seg_costs[i])
            w = nodes[wid]
            if z is None or w.cost < z.cost:
                labels[key] = wid
                if z is None:
                    stats.labels_created += 1
                else:
                    stats.labels_replaced += 1
                if monitor:
                    monitor.on_label(key, z, w)
            counter += 1
            prio = w.cost + heuristic(w.terminal_state) if heuristic else w.cost
            heapq.heappush(queue, (prio, counter, wid))
            stats.nodes_queued += 1
            if monitor:
                monitor.on_push(w, prio)

    if goal_node is None:
        stats.wall_time = time.perf_counter() - started
        return PlanOutcome(math.inf, None, None, stats, tree, labels)
    signal = tree.reconstruct_signal(goal_node)
    trajectory, _ = simulate(system, x_ic, signal, params.delta_max)
    stats.wall_time = time.perf_counter() - started
    return PlanOutcome(nodes[goal_node].cost, signal, trajectory, stats, tree, labels, goal_node)
