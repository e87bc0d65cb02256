"""Hypercube partition of the state space.

Two states are equivalent when ``floor(eta * x)`` agrees coordinate-wise.
Cells have side ``1/eta`` and radius ``sqrt(n)/eta``. Points on a cell face
belong to the cell above it (plain floor semantics, no snapping).
"""

from __future__ import annotations

import math
from typing import Tuple

import numpy as np

GridKey = Tuple[int, ...]


def grid_key(x, eta: float) -> GridKey:
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError(f"non-finite state {x}")
    return tuple(int(v) for v in np.floor(eta * x))


def grid_keys(xs, eta: float) -> np.ndarray:
    """Row-wise :func:`grid_key` for a ``(k, n)`` array; returns int64 ``(k, n)``."""
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    xs = np.asarray(xs, dtype=float)
    if not np.all(np.isfinite(xs)):
        raise ValueError("non-finite state in batch")
    return np.floor(eta * xs).astype(np.int64)


def equivalent(a, b, eta: float) -> bool:
    return grid_key(a, eta) == grid_key(b, eta)


def cell_radius(n: int, eta: float) -> float:
    return math.sqrt(n) / eta
