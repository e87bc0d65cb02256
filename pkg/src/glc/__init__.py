"""Generalized label correcting (GLC) kinodynamic motion planning."""

from .dynamics import (
    InputBall,
    InputBox,
    InputSphere,
    NumericalFailure,
    SystemModel,
    Trajectory,
    propagate,
    propagate_batch,
    sample_controls,
    simulate,
)
from .partition import GridKey, grid_key
from .planner import (
    InvariantMonitor,
    PlannerParams,
    PlanOutcome,
    PlanStats,
    Problem,
    SearchMonitor,
    check_feasible,
    glc_threshold,
    plan,
    prunes,
)
from .signal_tree import Signal, SignalNode, SignalTree

__version__ = "0.1.0"
