"""dfplace: dataflow-graph device placement with runtime rebalancing.

Pipeline: cost a validated operator graph against a device fleet, place it
(block or random), refine the placement with gain-driven moves under a
load-balance constraint, then simulate threshold-triggered out-box
migrations between devices.
"""

from .cost import (
    BOTTLENECK_TAGS,
    COMPUTE_BOUND,
    MEMORY_BOUND,
    NETWORK_BOUND,
    CostedGraph,
    compute_cost,
    cost_graph,
    select_relocatable,
    tag_nodes,
)
from .devices import DeviceFleet, DeviceProfile
from .errors import (
    ControlEdgeWithBytes,
    CycleDetected,
    DanglingEdge,
    DfplaceError,
    DuplicateNode,
    GraphValidationError,
    NegativeWeight,
    SchemaError,
    StatelessVariable,
    UnknownDevice,
    UnknownNode,
    UntaggedRelocatableNode,
)
from .graph import DataflowGraph, Edge, NodeId, OperatorNode, topological_sort, validate_graph
from .partition import Assignment, block_partition, cut_size, random_partition
from .refine import (
    GainTable,
    MoveRecord,
    RefinerConfig,
    balance_ok,
    build_gain_table,
    comm_cost,
    refine,
    try_balance_move,
    try_communication_move,
)
from .report import Report, build_report, imbalance
from .sim import (
    DeviceState,
    SimConfig,
    SimTrace,
    TraceEvent,
    makespan,
    overload_rule,
    simulate,
    underload_rule,
)

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "BOTTLENECK_TAGS",
    "COMPUTE_BOUND",
    "MEMORY_BOUND",
    "NETWORK_BOUND",
    "ControlEdgeWithBytes",
    "CostedGraph",
    "CycleDetected",
    "DanglingEdge",
    "DataflowGraph",
    "DeviceFleet",
    "DeviceProfile",
    "DeviceState",
    "DfplaceError",
    "DuplicateNode",
    "Edge",
    "GainTable",
    "GraphValidationError",
    "MoveRecord",
    "NegativeWeight",
    "NodeId",
    "OperatorNode",
    "RefinerConfig",
    "Report",
    "SchemaError",
    "SimConfig",
    "SimTrace",
    "StatelessVariable",
    "TraceEvent",
    "UnknownDevice",
    "UnknownNode",
    "UntaggedRelocatableNode",
    "balance_ok",
    "block_partition",
    "build_gain_table",
    "build_report",
    "comm_cost",
    "compute_cost",
    "cost_graph",
    "cut_size",
    "imbalance",
    "makespan",
    "overload_rule",
    "random_partition",
    "refine",
    "select_relocatable",
    "simulate",
    "tag_nodes",
    "topological_sort",
    "try_balance_move",
    "try_communication_move",
    "underload_rule",
    "validate_graph",
]
