"""Free-space and goal regions built from algebraic primitives.

Every region is open. Calling a region tests strict membership; its
*clearance* is a signed distance (positive inside) that agrees with the
membership test up to floating-point rounding on the boundary. It is exact for
boxes, balls and half-spaces and for their complements; intersections and
unions combine with ``min``/``max``, which is exact on the outside of a union
and inside an intersection and otherwise a conservative lower bound. The
oracle in :mod:`glc.analysis` relies on that lower-bound property.

Primitives may act on a subset of the state coordinates via ``axes``.
Everything is vectorised over leading dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np


class Region:
    def clearance(self, x) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x) -> np.ndarray:
        return self.clearance(x) > 0

    def exterior(self, x) -> np.ndarray:
        """Strictly outside the closure, i.e. inside the (open) complement."""
        return self.clearance(x) < 0

    def contains(self, x) -> bool:
        return bool(self(np.asarray(x, dtype=float)))

    def __and__(self, other: "Region") -> "Region":
        return Intersection((self, other))

    def __or__(self, other: "Region") -> "Region":
        return Union((self, other))

    def __invert__(self) -> "Region":
        return Complement(self)


def _take(x, axes) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x if axes is None else x[..., list(axes)]


@dataclass(frozen=True, eq=False)
class Box(Region):
    """Open box ``lo < x < hi``."""

    lo: Tuple[float, ...]
    hi: Tuple[float, ...]
    axes: Optional[Tuple[int, ...]] = None

    def clearance(self, x):
        lo, hi = np.asarray(self.lo, float), np.asarray(self.hi, float)
        p = _take(x, self.axes)
        q = np.abs(p - 0.5 * (lo + hi)) - 0.5 * (hi - lo)
        outside = np.sqrt(np.sum(np.maximum(q, 0.0) ** 2, axis=-1))
        inside = np.minimum(np.max(q, axis=-1), 0.0)
        return -(outside + inside)

    def __call__(self, x):
        p = _take(x, self.axes)
        return np.all((p > self.lo) & (p < self.hi), axis=-1)

    def exterior(self, x):
        p = _take(x, self.axes)
        return np.any((p < self.lo) | (p > self.hi), axis=-1)


@dataclass(frozen=True, eq=False)
class Ball(Region):
    """Open ball ``||x - center|| < radius``."""

    center: Tuple[float, ...]
    radius: float
    axes: Optional[Tuple[int, ...]] = None

    def clearance(self, x):
        d = _take(x, self.axes) - np.asarray(self.center, float)
        return self.radius - np.sqrt(np.sum(d * d, axis=-1))


@dataclass(frozen=True, eq=False)
class HalfSpace(Region):
    """Open half-space ``normal . x < offset``."""

    normal: Tuple[float, ...]
    offset: float
    axes: Optional[Tuple[int, ...]] = None

    def clearance(self, x):
        a = np.asarray(self.normal, float)
        return (self.offset - _take(x, self.axes) @ a) / np.linalg.norm(a)


@dataclass(frozen=True, eq=False)
class Everywhere(Region):
    def clearance(self, x):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape[:-1], np.inf)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.ones(x.shape[:-1], dtype=bool)

    def exterior(self, x):
        x = np.asarray(x, dtype=float)
        return np.zeros(x.shape[:-1], dtype=bool)


@dataclass(frozen=True, eq=False)
class Nowhere(Region):
    def clearance(self, x):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape[:-1], -np.inf)


@dataclass(frozen=True, eq=False)
class Intersection(Region):
    parts: Sequence[Region]

    def clearance(self, x):
        out = self.parts[0].clearance(x)
        for p in self.parts[1:]:
            out = np.minimum(out, p.clearance(x))
        return out

    def __call__(self, x):
        out = self.parts[0](x)
        for p in self.parts[1:]:
            out = out & p(x)
        return out

    def exterior(self, x):
        out = self.parts[0].exterior(x)
        for p in self.parts[1:]:
            out = out | p.exterior(x)
        return out


@dataclass(frozen=True, eq=False)
class Union(Region):
    parts: Sequence[Region]

    def clearance(self, x):
        out = self.parts[0].clearance(x)
        for p in self.parts[1:]:
            out = np.maximum(out, p.clearance(x))
        return out

    def __call__(self, x):
        out = self.parts[0](x)
        for p in self.parts[1:]:
            out = out | p(x)
        return out

    def exterior(self, x):
        out = self.parts[0].exterior(x)
        for p in self.parts[1:]:
            out = out & p.exterior(x)
        return out


@dataclass(frozen=True, eq=False)
class Complement(Region):
    inner: Region

    def clearance(self, x):
        return -self.inner.clearance(x)

    def __call__(self, x):
        return self.inner.exterior(x)

    def exterior(self, x):
        return self.inner(x)


def free_space(bounds: Optional[Region], obstacles: Sequence[Region]) -> Region:
    """``bounds`` minus the union of ``obstacles``; unbounded when ``bounds`` is None."""
    region: Region = bounds if bounds is not None else Everywhere()
    if obstacles:
        blocked = obstacles[0] if len(obstacles) == 1 else Union(tuple(obstacles))
        if isinstance(region, Everywhere):
            return Complement(blocked)
        return Intersection((region, Complement(blocked)))
    return region


def goal_union(parts: Sequence[Region]) -> Region:
    if not parts:
        return Nowhere()
    return parts[0] if len(parts) == 1 else Union(tuple(parts))


def primitive_from_dict(entry: dict) -> Region:
    """Build one primitive from ``{"box": {...}}``, ``{"ball": {...}}`` or ``{"halfspace": {...}}``."""
    if not isinstance(entry, dict) or len(entry) != 1:
        raise ValueError(f"primitive must be a single-key mapping, got {entry!r}")
    (kind, body), = entry.items()
    if not isinstance(body, dict):
        raise ValueError(f"{kind}: expected a mapping")
    axes = tuple(int(a) for a in body["axes"]) if body.get("axes") is not None else None
    try:
        if kind == "box":
            lo = tuple(float(v) for v in body["lo"])
            hi = tuple(float(v) for v in body["hi"])
            if len(lo) != len(hi) or any(a >= b for a, b in zip(lo, hi)):
                raise ValueError(f"box bounds invalid: {lo} / {hi}")
            return Box(lo, hi, axes)
        if kind == "ball":
            r = float(body["radius"])
            if not r > 0:
                raise ValueError("ball radius must be positive")
            return Ball(tuple(float(v) for v in body["center"]), r, axes)
        if kind == "halfspace":
            return HalfSpace(tuple(float(v) for v in body["normal"]), float(body["offset"]), axes)
    except KeyError as e:
        raise ValueError(f"{kind}: missing field {e}") from None
    raise ValueError(f"unknown primitive {kind!r}")
