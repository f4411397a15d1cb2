"""Simulator and analysis toolkit for distributed data collection with
persistent storage nodes in wireless sensor networks.

Sensors multicast their readings to every storage node within radio range;
storage nodes keep a fixed number of buffer slots and XOR-combine packets
once the slots run out.  A data collector queries a fraction of the
storage nodes and decodes over GF(2).
"""

__version__ = "0.1.0"

from dsasim.deployment import (
    Deployment,
    InvalidFractionError,
    Position,
    RadioParams,
    Region,
    clipped_coverage_area,
    deploy,
    in_range,
    neighbors_of_storage,
)
from dsasim.gf2 import (
    BitVector,
    CorruptSystemError,
    EliminationBasis,
    Equation,
    LinearSystem,
    eliminate,
    recoverable_count,
    xor_accumulate,
)
from dsasim.protocol import (
    ClusterMap,
    NetworkState,
    Packet,
    StorageNodeState,
    apply_update,
    clustering_phase,
    run_dissemination,
    sensing_phase,
    store_packet,
)
from dsasim.collector import (
    QueryPlan,
    TrialMetrics,
    assemble_system,
    evaluate_nested,
    evaluate_trial,
    select_query,
)

__all__ = [
    "BitVector",
    "ClusterMap",
    "CorruptSystemError",
    "Deployment",
    "EliminationBasis",
    "Equation",
    "InvalidFractionError",
    "LinearSystem",
    "NetworkState",
    "Packet",
    "Position",
    "QueryPlan",
    "RadioParams",
    "Region",
    "StorageNodeState",
    "TrialMetrics",
    "apply_update",
    "assemble_system",
    "clipped_coverage_area",
    "clustering_phase",
    "deploy",
    "eliminate",
    "evaluate_nested",
    "evaluate_trial",
    "in_range",
    "neighbors_of_storage",
    "recoverable_count",
    "run_dissemination",
    "select_query",
    "sensing_phase",
    "store_packet",
    "xor_accumulate",
]
