"""Tree of piecewise-constant control signals.

Every node stands for one signal: the controls applied on the path from the
root to that node, each held for ``c / R`` seconds. Nodes live in an
append-only arena and are addressed by dense integer ids.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Optional

import numpy as np


@dataclass(frozen=True, slots=True)
class SignalNode:
    id: int
    parent: Optional[int]
    control: Optional[np.ndarray]
    depth: int
    terminal_state: np.ndarray
    terminal_time: float
    cost: float


@dataclass(frozen=True)
class Signal:
    """Piecewise-constant input: ``controls[i]`` is held on ``[i*d, (i+1)*d)``."""

    controls: tuple
    segment_duration: float

    def __len__(self) -> int:
        return len(self.controls)

    @property
    def duration(self) -> float:
        return len(self.controls) * self.segment_duration

    def value_at(self, t: float) -> np.ndarray:
        if not self.controls:
            raise ValueError("empty signal has no value")
        if t < 0 or t > self.duration:
            raise ValueError(f"t={t} outside [0, {self.duration}]")
        i = min(int(t // self.segment_duration), len(self.controls) - 1)
        return self.controls[i]

    def concat(self, other: "Signal") -> "Signal":
        if other.segment_duration != self.segment_duration:
            raise ValueError("segment durations differ")
        return Signal(self.controls + other.controls, self.segment_duration)


class SignalTree:
    """Append-only arena of :class:`SignalNode`.

    ``c`` and ``R`` are kept separately so that node times are computed as
    ``(depth * c) / R`` with no accumulated rounding.
    """

    def __init__(self, c: float, R: int):
        if c <= 0 or R < 1:
            raise ValueError("need c > 0 and R >= 1")
        self.c = float(c)
        self.R = int(R)
        self._nodes: List[SignalNode] = []

    @property
    def segment_duration(self) -> float:
        return self.c / self.R

    def time_at_depth(self, depth: int) -> float:
        return depth * self.c / self.R

    def __len__(self) -> int:
        return len(self._nodes)

    def __iter__(self) -> Iterator[SignalNode]:
        return iter(self._nodes)

    def __getitem__(self, node_id: int) -> SignalNode:
        return self.node(node_id)

    def node(self, node_id: int) -> SignalNode:
        if not isinstance(node_id, (int, np.integer)) or not 0 <= node_id < len(self._nodes):
            raise KeyError(f"unknown node id {node_id!r}")
        return self._nodes[node_id]

    def create_root(self, x_ic) -> int:
        state = np.array(x_ic, dtype=float)
        state.flags.writeable = False
        nid = len(self._nodes)
        self._nodes.append(SignalNode(nid, None, None, 0, state, 0.0, 0.0))
        return nid

    def add_child(self, parent: int, control, terminal_state, segment_cost: float) -> int:
        p = self.node(parent)
        if not segment_cost >= 0:
            raise ValueError(f"segment cost must be nonnegative, got {segment_cost}")
        u = np.array(control, dtype=float)
        x = np.array(terminal_state, dtype=float)
        u.flags.writeable = False
        x.flags.writeable = False
        depth = p.depth + 1
        nid = len(self._nodes)
        self._nodes.append(
            SignalNode(nid, parent, u, depth, x, self.time_at_depth(depth), p.cost + float(segment_cost))
        )
        return nid

    def path(self, node_id: int) -> List[SignalNode]:
        """Nodes from the root down to ``node_id`` inclusive."""
        out = []
        n = self.node(node_id)
        while True:
            out.append(n)
            if n.parent is None:
                break
            n = self._nodes[n.parent]
        out.reverse()
        return out

    def reconstruct_signal(self, node_id: int) -> Signal:
        controls = tuple(n.control for n in self.path(node_id)[1:])
        return Signal(controls, self.segment_duration)
