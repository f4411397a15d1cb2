"""Clustering, sensing and storage phases of the dissemination protocol.

Storage nodes beacon, sensors record which storage nodes they heard, and
each sensor then multicasts its reading to every one of them.  A storage
node fills free buffer slots with plain copies; once full, further
initialization packets are XORed into an existing slot.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from dsasim.deployment import Deployment, RadioParams, coverage_matrix
from dsasim.gf2 import BitVector, Equation, LengthMismatchError

INIT = 0
UPDATE = 1

OVERFLOW_POLICIES = ("random", "drop")
UPDATE_POLICIES = ("all", "first")

DEFAULT_PAYLOAD_BITS = 64


class UnknownSensorError(KeyError):
    pass


@dataclass(frozen=True)
class Packet:
    sensor_id: int
    payload: BitVector
    flag: int = INIT

    def __post_init__(self):
        if self.flag not in (INIT, UPDATE):
            raise ValueError(f"flag must be 0 or 1, got {self.flag}")


@dataclass(frozen=True)
class StorageNodeState:
    """Buffer of one storage node.

    ``slots`` always has ``epsilon`` entries; those at or past ``next_free``
    are empty equations.
    """

    node_index: int
    epsilon: int
    slots: tuple[Equation, ...]
    next_free: int = 0
    dropped_updates: int = 0
    overflow_merges: int = 0

    @classmethod
    def empty(cls, node_index: int, epsilon: int, k: int, payload_bits: int) -> StorageNodeState:
        if epsilon < 1:
            raise ValueError(f"epsilon must be at least 1, got {epsilon}")
        blank = Equation.empty(k, payload_bits)
        return cls(node_index, epsilon, (blank,) * epsilon)

    @property
    def k(self) -> int:
        return self.slots[0].coeffs.length

    @property
    def payload_bits(self) -> int:
        return self.slots[0].payload.length

    @property
    def occupied(self) -> tuple[Equation, ...]:
        return self.slots[: self.next_free]


def _put(slots: tuple[Equation, ...], index: int, eq: Equation) -> tuple[Equation, ...]:
    return slots[:index] + (eq,) + slots[index + 1 :]


def store_packet(
    node: StorageNodeState,
    p: Packet,
    rng: np.random.Generator,
    overflow: str = "random",
    update: str = "all",
) -> StorageNodeState:
    """Apply one incoming packet to a storage node's buffer.

    ``overflow`` selects what happens to an initialization packet when every
    slot is taken: ``"random"`` XORs it into a uniformly chosen slot,
    ``"drop"`` discards it.  ``update`` selects which slots an update packet
    (whose payload is the XOR difference between old and new reading)
    touches: ``"all"`` referencing slots, or only the ``"first"`` one.
    """
    k = node.k
    sid = p.sensor_id
    if not 0 <= sid < k:
        raise UnknownSensorError(sid)
    if p.payload.length != node.payload_bits:
        raise LengthMismatchError(
            f"packet payload has {p.payload.length} bits, buffer slots hold {node.payload_bits}"
        )
    bit = 1 << sid

    if p.flag == INIT:
        if node.next_free < node.epsilon:
            eq = Equation(BitVector(k, bit), p.payload)
            return replace(node, slots=_put(node.slots, node.next_free, eq), next_free=node.next_free + 1)
        if overflow == "drop":
            return node
        if overflow != "random":
            raise ValueError(f"unknown overflow policy {overflow!r}")
        j = int(rng.integers(node.epsilon))
        old = node.slots[j]
        eq = Equation(
            BitVector(k, old.coeffs.bits ^ bit),
            BitVector(old.payload.length, old.payload.bits ^ p.payload.bits),
        )
        return replace(node, slots=_put(node.slots, j, eq), overflow_merges=node.overflow_merges + 1)

    if update not in UPDATE_POLICIES:
        raise ValueError(f"unknown update policy {update!r}")
    slots = node.slots
    touched = False
    for j in range(node.next_free):
        eq = slots[j]
        if eq.coeffs.bits & bit:
            slots = _put(slots, j, Equation(eq.coeffs, eq.payload ^ p.payload))
            touched = True
            if update == "first":
                break
    if not touched:
        return replace(node, dropped_updates=node.dropped_updates + 1)
    return replace(node, slots=slots)


@dataclass(frozen=True)
class ClusterMap:
    sensor_to_storage: tuple[frozenset[int], ...]
    storage_to_sensors: tuple[frozenset[int], ...]

    @property
    def orphans(self) -> frozenset[int]:
        return frozenset(i for i, heard in enumerate(self.sensor_to_storage) if not heard)

    @property
    def deliveries(self) -> int:
        return sum(len(heard) for heard in self.sensor_to_storage)

    def degree(self, storage_index: int) -> int:
        return len(self.storage_to_sensors[storage_index])


def clustering_phase(d: Deployment, radio: RadioParams) -> ClusterMap:
    """Beacon exchange: each sensor learns which storage nodes are within range."""
    cover = coverage_matrix(d, radio)
    storage_to_sensors = tuple(frozenset(int(i) for i in np.flatnonzero(row)) for row in cover)
    sensor_to_storage = tuple(frozenset(int(j) for j in np.flatnonzero(col)) for col in cover.T)
    return ClusterMap(sensor_to_storage, storage_to_sensors)


@dataclass(frozen=True, eq=False)
class NetworkState:
    deployment: Deployment
    radio: RadioParams
    cluster_map: ClusterMap
    storage_states: tuple[StorageNodeState, ...]
    ground_truth: tuple[BitVector, ...]
    seed: int
    epsilon: int
    payload_bits: int = DEFAULT_PAYLOAD_BITS
    overflow: str = "random"
    update: str = "all"

    def __post_init__(self):
        if len(self.storage_states) != self.deployment.n_storage:
            raise ValueError("one storage state per storage node required")
        if len(self.ground_truth) != self.deployment.k:
            raise ValueError("one ground-truth payload per sensor required")

    @property
    def k(self) -> int:
        return self.deployment.k

    @property
    def n_storage(self) -> int:
        return self.deployment.n_storage

    def __eq__(self, other):
        if not isinstance(other, NetworkState):
            return NotImplemented
        return (
            self.deployment == other.deployment
            and self.radio == other.radio
            and self.cluster_map == other.cluster_map
            and self.storage_states == other.storage_states
            and self.ground_truth == other.ground_truth
            and (self.seed, self.epsilon, self.payload_bits, self.overflow, self.update)
            == (other.seed, other.epsilon, other.payload_bits, other.overflow, other.update)
        )

    __hash__ = None

    def to_dict(self) -> dict:
        """Diagnostic dump: geometry, clusters, and every occupied slot."""
        d = self.deployment
        return {
            "seed": self.seed,
            "L": d.region.side_length,
            "delta": self.radio.delta,
            "epsilon": self.epsilon,
            "payload_bits": self.payload_bits,
            "overflow": self.overflow,
            "k": d.k,
            "n_storage": d.n_storage,
            "orphans": sorted(self.cluster_map.orphans),
            "sensors": [
                {
                    "id": i,
                    "x": float(d.sensor_xy[i, 0]),
                    "y": float(d.sensor_xy[i, 1]),
                    "storage": sorted(self.cluster_map.sensor_to_storage[i]),
                    "payload": self.ground_truth[i].to_hex(),
                }
                for i in range(d.k)
            ],
            "storage": [
                {
                    "id": node.node_index,
                    "x": float(d.storage_xy[node.node_index, 0]),
                    "y": float(d.storage_xy[node.node_index, 1]),
                    "degree": self.cluster_map.degree(node.node_index),
                    "next_free": node.next_free,
                    "overflow_merges": node.overflow_merges,
                    "dropped_updates": node.dropped_updates,
                    "slots": [
                        {"sensors": eq.coeffs.indices(), "payload": eq.payload.to_hex()}
                        for eq in node.occupied
                    ],
                }
                for node in self.storage_states
            ],
        }


def random_payloads(rng: np.random.Generator, count: int, payload_bits: int) -> tuple[BitVector, ...]:
    nbytes = (payload_bits + 7) // 8
    mask = (1 << payload_bits) - 1
    return tuple(
        BitVector(payload_bits, int.from_bytes(rng.bytes(nbytes), "little") & mask) for _ in range(count)
    )


def sensing_phase(state: NetworkState) -> list[tuple[Packet, int]]:
    """Initialization packets in send order: sensor by sensor, and for each
    sensor every storage node it heard, in index order."""
    out = []
    for i, heard in enumerate(state.cluster_map.sensor_to_storage):
        if not heard:
            continue
        packet = Packet(i, state.ground_truth[i], INIT)
        out.extend((packet, j) for j in sorted(heard))
    return out


def deliver(
    state: NetworkState, deliveries: Sequence[tuple[Packet, int]], rng: np.random.Generator
) -> NetworkState:
    nodes = list(state.storage_states)
    for packet, j in deliveries:
        nodes[j] = store_packet(nodes[j], packet, rng, state.overflow, state.update)
    return replace(state, storage_states=tuple(nodes))


def run_dissemination(
    d: Deployment,
    radio: RadioParams,
    epsilon: int,
    payload_bits: int = DEFAULT_PAYLOAD_BITS,
    seed: int = 0,
    overflow: str = "random",
    update: str = "all",
) -> NetworkState:
    """Run clustering, sensing and storage for one deployment.

    Ground-truth readings and overflow slot choices come from one generator
    seeded with ``seed``, in that order.
    """
    if epsilon < 1:
        raise ValueError(f"epsilon must be at least 1, got {epsilon}")
    if payload_bits < 1:
        raise ValueError(f"payload_bits must be at least 1, got {payload_bits}")
    if overflow not in OVERFLOW_POLICIES:
        raise ValueError(f"unknown overflow policy {overflow!r}")
    if update not in UPDATE_POLICIES:
        raise ValueError(f"unknown update policy {update!r}")
    rng = np.random.default_rng(seed)
    truth = random_payloads(rng, d.k, payload_bits)
    clusters = clustering_phase(d, radio)
    nodes = tuple(StorageNodeState.empty(j, epsilon, d.k, payload_bits) for j in range(d.n_storage))
    state = NetworkState(d, radio, clusters, nodes, truth, seed, epsilon, payload_bits, overflow, update)
    return deliver(state, sensing_phase(state), rng)


def apply_update(state: NetworkState, sensor_id: int, new_value: BitVector, rng=None) -> NetworkState:
    """Sensor ``sensor_id`` senses ``new_value`` and multicasts the XOR
    difference to its storage nodes as an update packet."""
    if not 0 <= sensor_id < state.k:
        raise UnknownSensorError(sensor_id)
    old = state.ground_truth[sensor_id]
    packet = Packet(sensor_id, old ^ new_value, UPDATE)
    if rng is None:
        rng = np.random.default_rng(state.seed)
    heard = sorted(state.cluster_map.sensor_to_storage[sensor_id])
    updated = deliver(state, [(packet, j) for j in heard], rng)
    truth = state.ground_truth[:sensor_id] + (new_value,) + state.ground_truth[sensor_id + 1 :]
    return replace(updated, ground_truth=truth)
