"""Querying phase: pick storage nodes, decode their buffers, score the trial."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from dsasim.gf2 import EliminationBasis, LinearSystem
from dsasim.protocol import NetworkState


class InvalidEtaError(ValueError):
    pass


class PayloadMismatchError(AssertionError):
    """A decoded payload disagrees with what the sensor actually sent."""


def query_size(nprime: int, eta: float) -> int:
    if not 0.0 < eta <= 1.0:
        raise InvalidEtaError(f"eta must lie in (0, 1], got {eta}")
    return min(nprime, max(1, math.floor(eta * nprime + 0.5)))


@dataclass(frozen=True)
class QueryPlan:
    nprime: int
    selection: tuple[int, ...]
    seed: int | None = None

    def __post_init__(self):
        sel = tuple(int(j) for j in self.selection)
        object.__setattr__(self, "selection", sel)
        if len(set(sel)) != len(sel):
            raise ValueError("query selection contains repeated storage indices")
        if len(sel) > self.nprime or any(not 0 <= j < self.nprime for j in sel):
            raise ValueError(f"query selection does not fit {self.nprime} storage nodes")

    @property
    def h(self) -> int:
        return len(self.selection)

    @property
    def eta(self) -> float:
        return self.h / self.nprime


def select_query(nprime: int, eta: float, seed) -> QueryPlan:
    """Choose ``round(eta * nprime)`` (at least one) storage nodes uniformly
    without replacement.

    The choice is the prefix of a seeded permutation, so plans drawn with the
    same seed are nested: a larger ``eta`` extends a smaller one.
    """
    h = query_size(nprime, eta)
    order = np.random.default_rng(seed).permutation(nprime)
    return QueryPlan(nprime, tuple(int(j) for j in order[:h]), seed)


def assemble_system(state: NetworkState, plan: QueryPlan) -> LinearSystem:
    rows = []
    for j in plan.selection:
        rows.extend(state.storage_states[j].occupied)
    return LinearSystem(state.k, tuple(rows), state.payload_bits)


@dataclass(frozen=True)
class TrialMetrics:
    eta: float
    rho: float
    all_recovered: bool
    rank: int
    orphan_count: int
    recovered: int = 0
    h: int = 0
    rows: int = 0


def _check_payloads(basis: EliminationBasis, state: NetworkState) -> None:
    truth = state.ground_truth
    for sensor, payload in basis.solved_payloads().items():
        if payload != truth[sensor]:
            raise PayloadMismatchError(
                f"sensor {sensor}: decoded {payload.to_hex()}, expected {truth[sensor].to_hex()}"
            )


def _metrics(basis: EliminationBasis, state: NetworkState, plan: QueryPlan, rows: int) -> TrialMetrics:
    k = state.k
    got = basis.recovered_count
    return TrialMetrics(
        eta=plan.eta,
        rho=got / k,
        all_recovered=got == k,
        rank=basis.rank,
        orphan_count=len(state.cluster_map.orphans),
        recovered=got,
        h=plan.h,
        rows=rows,
    )


def evaluate_trial(state: NetworkState, plan: QueryPlan) -> TrialMetrics:
    """Decode the queried buffers and check every recovered payload."""
    system = assemble_system(state, plan)
    basis = EliminationBasis(system.k, system.payload_bits)
    for row in system.rows:
        basis.add(row.coeffs.bits, row.payload.bits)
    _check_payloads(basis, state)
    return _metrics(basis, state, plan, len(system))


def evaluate_nested(state: NetworkState, plans: Sequence[QueryPlan]) -> list[TrialMetrics]:
    """Metrics for a chain of nested plans, sharing one elimination.

    Plans are processed smallest first and each must extend the previous
    selection; results come back in the order the plans were given.
    """
    order = sorted(range(len(plans)), key=lambda i: plans[i].h)
    basis = EliminationBasis(state.k, state.payload_bits)
    done: tuple[int, ...] = ()
    rows = 0
    out: list[TrialMetrics | None] = [None] * len(plans)
    for i in order:
        plan = plans[i]
        if plan.selection[: len(done)] != done:
            raise ValueError("query plans are not nested")
        for j in plan.selection[len(done) :]:
            for eq in state.storage_states[j].occupied:
                basis.add(eq.coeffs.bits, eq.payload.bits)
                rows += 1
        done = plan.selection
        _check_payloads(basis, state)
        out[i] = _metrics(basis, state, plan, rows)
    return out
