"""Node placement and radio-range geometry on a square region."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class InvalidFractionError(ValueError):
    """The storage fraction leaves no sensors or no storage nodes."""


class Position(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Region:
    side_length: float

    def __post_init__(self):
        if not self.side_length > 0:
            raise ValueError(f"side_length must be positive, got {self.side_length}")

    @property
    def area(self) -> float:
        return self.side_length * self.side_length

    def contains(self, p: Position) -> bool:
        L = self.side_length
        return 0.0 <= p[0] <= L and 0.0 <= p[1] <= L


@dataclass(frozen=True)
class RadioParams:
    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")


@dataclass(frozen=True, eq=False)
class Deployment:
    """Positions of the k sensors and n - k storage nodes for one trial.

    Positions are kept as read-only ``(count, 2)`` float arrays; use
    :meth:`sensor` / :meth:`storage` for single :class:`Position` values.
    """

    region: Region
    sensor_xy: np.ndarray
    storage_xy: np.ndarray
    seed: int

    def __post_init__(self):
        for name in ("sensor_xy", "storage_xy"):
            arr = np.array(getattr(self, name), dtype=float).reshape(-1, 2)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if self.k < 1 or self.n_storage < 1:
            raise InvalidFractionError(
                f"need at least one sensor and one storage node (k={self.k}, n-k={self.n_storage})"
            )

    @property
    def k(self) -> int:
        return len(self.sensor_xy)

    @property
    def n_storage(self) -> int:
        return len(self.storage_xy)

    @property
    def n(self) -> int:
        return self.k + self.n_storage

    @property
    def sensor_positions(self) -> list[Position]:
        return [Position(float(x), float(y)) for x, y in self.sensor_xy]

    @property
    def storage_positions(self) -> list[Position]:
        return [Position(float(x), float(y)) for x, y in self.storage_xy]

    def sensor(self, i: int) -> Position:
        x, y = self.sensor_xy[i]
        return Position(float(x), float(y))

    def storage(self, j: int) -> Position:
        x, y = self.storage_xy[j]
        return Position(float(x), float(y))

    def __eq__(self, other):
        if not isinstance(other, Deployment):
            return NotImplemented
        return (
            self.region == other.region
            and self.seed == other.seed
            and np.array_equal(self.sensor_xy, other.sensor_xy)
            and np.array_equal(self.storage_xy, other.storage_xy)
        )

    __hash__ = None


def storage_count(n: int, storage_fraction: float) -> int:
    return math.floor(n * storage_fraction)


def deploy(n: int, storage_fraction: float, region: Region, seed: int) -> Deployment:
    """Place ``n`` nodes uniformly at random; ``floor(n * storage_fraction)``
    of them are storage nodes and the rest are sensors.

    Sensor positions are drawn first, then storage positions, from a single
    generator seeded with ``seed``.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if not 0.0 < storage_fraction < 1.0:
        raise InvalidFractionError(f"storage_fraction must lie in (0, 1), got {storage_fraction}")
    n_storage = storage_count(n, storage_fraction)
    k = n - n_storage
    if n_storage < 1 or k < 1:
        raise InvalidFractionError(
            f"n={n}, storage_fraction={storage_fraction} gives k={k}, n-k={n_storage}"
        )
    rng = np.random.default_rng(seed)
    L = region.side_length
    sensors = rng.uniform(0.0, L, size=(k, 2))
    storage = rng.uniform(0.0, L, size=(n_storage, 2))
    return Deployment(region, sensors, storage, seed)


def in_range(r: Position, s: Position, radio: RadioParams) -> bool:
    dx = r[0] - s[0]
    dy = r[1] - s[1]
    return dx * dx + dy * dy <= radio.delta * radio.delta


def coverage_matrix(d: Deployment, radio: RadioParams) -> np.ndarray:
    """Boolean ``(n - k, k)`` matrix; entry ``[j, i]`` is true when sensor
    ``i`` lies within range of storage node ``j``.  Uses the same squared
    distance test as :func:`in_range`."""
    diff = d.storage_xy[:, None, :] - d.sensor_xy[None, :, :]
    dx = diff[..., 0]
    dy = diff[..., 1]
    return dx * dx + dy * dy <= radio.delta * radio.delta


def neighbors_of_storage(d: Deployment, storage_index: int, radio: RadioParams) -> frozenset[int]:
    if not 0 <= storage_index < d.n_storage:
        raise IndexError(f"storage index {storage_index} out of range for {d.n_storage} storage nodes")
    diff = d.sensor_xy - d.storage_xy[storage_index]
    dx = diff[:, 0]
    dy = diff[:, 1]
    hits = np.flatnonzero(dx * dx + dy * dy <= radio.delta * radio.delta)
    return frozenset(int(i) for i in hits)


def _quadrant_area(x: float, y: float, r: float) -> float:
    """Area of the disc of radius ``r`` at the origin intersected with the
    rectangle spanned by the origin and ``(x, y)``, signed by the quadrant."""
    sign = math.copysign(1.0, x) * math.copysign(1.0, y)
    x = min(abs(x), r)
    y = min(abs(y), r)
    if x == 0.0 or y == 0.0:
        return 0.0
    if x * x + y * y <= r * r:
        return sign * x * y
    # Past u0 the arc lies below the horizontal edge at height y.
    u0 = math.sqrt(max(r * r - y * y, 0.0))

    def segment(u: float) -> float:
        return 0.5 * (u * math.sqrt(max(r * r - u * u, 0.0)) + r * r * math.asin(min(u / r, 1.0)))

    return sign * (u0 * y + segment(x) - segment(u0))


def disc_rectangle_area(cx: float, cy: float, r: float, x0: float, y0: float, x1: float, y1: float) -> float:
    """Exact area of the disc centred at ``(cx, cy)`` inside ``[x0, x1] x [y0, y1]``."""
    a, b = x0 - cx, x1 - cx
    c, d = y0 - cy, y1 - cy
    area = _quadrant_area(b, d, r) - _quadrant_area(a, d, r) - _quadrant_area(b, c, r) + _quadrant_area(a, c, r)
    return min(max(area, 0.0), math.pi * r * r)


def clipped_coverage_area(r: Position, radio: RadioParams, region: Region) -> float:
    """Part of the radio disc around ``r`` that falls inside the region."""
    L = region.side_length
    return disc_rectangle_area(r[0], r[1], radio.delta, 0.0, 0.0, L, L)
