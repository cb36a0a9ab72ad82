"""Dataflow graph data model, validation, and topological ordering.

Nodes are operators with an arithmetic-op count and a touched-byte count;
edges carry tensor bytes (data) or nothing (control). The graph must be a
DAG over data AND control edges: block partitioning needs a topological
order, so producers have to unroll any training loops before export.

Node ids may be strings or integers. All orderings in this package break
ties by ascending node id; graphs mixing both id types order integers
before strings so the order stays total and deterministic.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .errors import (
    ControlEdgeWithBytes,
    CycleDetected,
    DanglingEdge,
    DuplicateNode,
    NegativeWeight,
    StatelessVariable,
)

NodeId = str | int

OP_KINDS = frozenset(
    {"matmul", "conv2d", "elementwise", "reduction", "variable", "opaque"}
)

EDGE_KINDS = frozenset({"data", "control"})


def node_sort_key(node_id: NodeId) -> tuple[int, NodeId]:
    """Total order over mixed str/int node ids (ints first, then strings)."""
    return (0, node_id) if isinstance(node_id, int) else (1, node_id)


@dataclass(frozen=True)
class OperatorNode:
    """One operator in the dataflow graph.

    op_count is the number of arithmetic operations the operator performs;
    bytes_touched is the bytes it reads plus writes (used for memory-bound
    tagging). measured_cost_us, when present, overrides the analytical cost
    on every device.
    """

    id: NodeId
    op_kind: str
    op_count: int = 0
    bytes_touched: int = 0
    stateful: bool = False
    measured_cost_us: float | None = None


@dataclass(frozen=True)
class Edge:
    """A data or control dependency. Control edges always weigh 0 bytes."""

    src: NodeId
    dst: NodeId
    kind: str = "data"
    bytes: int = 0


@dataclass
class DataflowGraph:
    """A directed graph of operator nodes; parallel edges are allowed and
    their byte weights accumulate in every cost computation."""

    nodes: list[OperatorNode] = field(default_factory=list)
    edges: list[Edge] = field(default_factory=list)

    def node_ids(self) -> list[NodeId]:
        return [n.id for n in self.nodes]

    def node_map(self) -> dict[NodeId, OperatorNode]:
        return {n.id: n for n in self.nodes}


def validate_graph(graph: DataflowGraph) -> DataflowGraph:
    """Check every structural invariant and return the graph unchanged.

    Raises DuplicateNode, NegativeWeight, StatelessVariable, DanglingEdge,
    ControlEdgeWithBytes, or CycleDetected (with one witness cycle).
    """
    seen: set[NodeId] = set()
    for node in graph.nodes:
        if node.id in seen:
            raise DuplicateNode(node.id)
        seen.add(node.id)
        if node.op_count < 0:
            raise NegativeWeight(node.id, "op_count", node.op_count)
        if node.bytes_touched < 0:
            raise NegativeWeight(node.id, "bytes_touched", node.bytes_touched)
        if node.measured_cost_us is not None and node.measured_cost_us < 0:
            raise NegativeWeight(node.id, "measured_cost_us", node.measured_cost_us)
        if node.op_kind == "variable" and not node.stateful:
            raise StatelessVariable(node.id)

    for edge in graph.edges:
        if edge.src not in seen or edge.dst not in seen:
            raise DanglingEdge(edge)
        if edge.src == edge.dst:
            # A self-loop is the smallest possible cycle.
            raise CycleDetected([edge.src])
        if edge.bytes < 0:
            raise NegativeWeight((edge.src, edge.dst), "bytes", edge.bytes)
        if edge.kind == "control" and edge.bytes != 0:
            raise ControlEdgeWithBytes(edge)

    topological_sort(graph)  # raises CycleDetected on any cycle
    return graph


def topological_sort(graph: DataflowGraph) -> list[NodeId]:
    """Kahn's algorithm with a heap so equal-depth nodes come out in
    ascending node-id order. Deterministic for a given graph."""
    indegree: dict[NodeId, int] = {n.id: 0 for n in graph.nodes}
    successors: dict[NodeId, list[NodeId]] = {n.id: [] for n in graph.nodes}
    for edge in graph.edges:
        indegree[edge.dst] += 1
        successors[edge.src].append(edge.dst)

    ready = [node_sort_key(nid) for nid, deg in indegree.items() if deg == 0]
    heapq.heapify(ready)
    order: list[NodeId] = []
    while ready:
        _, nid = heapq.heappop(ready)
        order.append(nid)
        for succ in successors[nid]:
            indegree[succ] -= 1
            if indegree[succ] == 0:
                heapq.heappush(ready, node_sort_key(succ))

    if len(order) != len(graph.nodes):
        raise CycleDetected(_witness_cycle(graph, {nid for nid, d in indegree.items() if d > 0}))
    return order


def _witness_cycle(graph: DataflowGraph, remaining: set[NodeId]) -> list[NodeId]:
    """Extract one concrete cycle from the nodes Kahn's algorithm could not
    resolve. Every such node keeps at least one unresolved predecessor, so
    walking predecessors must revisit a node; the slice from its first
    visit, reversed, is a forward cycle."""
    pred: dict[NodeId, list[NodeId]] = {nid: [] for nid in remaining}
    for edge in graph.edges:
        if edge.src in remaining and edge.dst in remaining:
            pred[edge.dst].append(edge.src)
    start = min(remaining, key=node_sort_key)
    path: list[NodeId] = []
    seen_at: dict[NodeId, int] = {}
    current = start
    while current not in seen_at:
        seen_at[current] = len(path)
        path.append(current)
        current = min(pred[current], key=node_sort_key)
    return list(reversed(path[seen_at[current]:]))
