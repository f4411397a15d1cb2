"""Closed-form coverage and buffer probabilities used to cross-check the simulator.

All probabilities are built from the per-pair value
``(pi * delta**2 - a) / (L**2 * k)`` where ``a`` is the part of the radio
disc lying outside the region.  Their powers underflow quickly at realistic
parameters, so each power also has a natural-log companion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from dsasim.deployment import Position, RadioParams, Region, clipped_coverage_area


@dataclass(frozen=True)
class AnalyticalParams:
    n: int
    k: int
    delta: float
    L: float
    epsilon: int
    a: float = 0.0

    def __post_init__(self):
        if not 0 < self.k < self.n:
            raise ValueError(f"need 0 < k < n, got k={self.k}, n={self.n}")
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if not self.L > 0:
            raise ValueError(f"L must be positive, got {self.L}")
        if self.epsilon < 1:
            raise ValueError(f"epsilon must be at least 1, got {self.epsilon}")
        disc = math.pi * self.delta**2
        if not 0.0 <= self.a <= disc:
            raise ValueError(f"a must lie in [0, pi*delta^2] = [0, {disc}], got {self.a}")

    @classmethod
    def at_position(cls, n: int, k: int, delta: float, L: float, epsilon: int, position: Position):
        """Parameters for a storage node at ``position``, with ``a`` taken from
        the exact disc/square intersection."""
        covered = clipped_coverage_area(position, RadioParams(delta), Region(L))
        a = max(math.pi * delta**2 - covered, 0.0)
        return cls(n, k, delta, L, epsilon, a)

    @property
    def n_storage(self) -> int:
        return self.n - self.k


def buffer_condition(p: AnalyticalParams) -> bool:
    """True when each storage node has at least ``k / (n - k)`` buffer slots."""
    return p.epsilon * p.n_storage >= p.k


def coverage_factor(p: AnalyticalParams) -> float:
    """Chance that a uniform point of the region falls inside one storage
    node's radio range."""
    return max(math.pi * p.delta**2 - p.a, 0.0) / (p.L * p.L)


def p_sensor_at_storage(p: AnalyticalParams) -> float:
    return coverage_factor(p) / p.k


def log_p_sensor_at_storage(p: AnalyticalParams) -> float:
    v = p_sensor_at_storage(p)
    return math.log(v) if v > 0 else -math.inf


def log_p_sensor_at_all_storage(p: AnalyticalParams) -> float:
    return p.n_storage * log_p_sensor_at_storage(p)


def p_sensor_at_all_storage(p: AnalyticalParams) -> float:
    return p_sensor_at_storage(p) ** p.n_storage


def log_p_all_sensors_at_storage(p: AnalyticalParams) -> float:
    return p.k * log_p_sensor_at_storage(p)


def p_all_sensors_at_storage(p: AnalyticalParams) -> float:
    return p_sensor_at_storage(p) ** p.k


def summary(p: AnalyticalParams) -> dict[str, object]:
    return {
        "buffer_condition": buffer_condition(p),
        "buffer_threshold": p.k / p.n_storage,
        "clipped_outside_area": p.a,
        "coverage_factor": coverage_factor(p),
        "p_sensor_at_storage": p_sensor_at_storage(p),
        "log_p_sensor_at_storage": log_p_sensor_at_storage(p),
        "p_sensor_at_all_storage": p_sensor_at_all_storage(p),
        "log_p_sensor_at_all_storage": log_p_sensor_at_all_storage(p),
        "p_all_sensors_at_storage": p_all_sensors_at_storage(p),
        "log_p_all_sensors_at_storage": log_p_all_sensors_at_storage(p),
    }
