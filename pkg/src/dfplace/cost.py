"""Analytical cost model.

Costs every (node, device) pair, selects the expensive stateless nodes that
later stages are allowed to move, and classifies each node by its dominant
resource (compute / memory / network) for the runtime rebalancing rules.
"""

from __future__ import annotations

from dataclasses import dataclass

from .devices import DeviceFleet, DeviceProfile
from .errors import UnknownDevice
from .graph import DataflowGraph, Edge, NodeId, OperatorNode, node_sort_key

COMPUTE_BOUND = "compute_bound"
MEMORY_BOUND = "memory_bound"
NETWORK_BOUND = "network_bound"
BOTTLENECK_TAGS = (COMPUTE_BOUND, MEMORY_BOUND, NETWORK_BOUND)

DEFAULT_EXPENSIVE_FRACTION = 0.9


def compute_cost(node: OperatorNode, device: DeviceProfile) -> float:
    """Time units to run one node on one device.

    A measured profile value wins over the analytical estimate: real
    measurements beat the model whenever both exist. Otherwise the cost is
    op_count / compute_throughput.
    """
    if node.measured_cost_us is not None:
        return float(node.measured_cost_us)
    return node.op_count / device.compute_throughput


@dataclass
class CostedGraph:
    """A validated graph plus its per-(node, device) cost table.

    Also caches incoming/outgoing edge lists per node so gain computations
    do not rescan the edge list, and the whole-graph-on-one-device totals
    used as partitioning targets.
    """

    graph: DataflowGraph
    fleet: DeviceFleet
    node_cost: dict[NodeId, dict[str, float]]
    total_cost_per_device_view: dict[str, float]
    incoming: dict[NodeId, list[Edge]]
    outgoing: dict[NodeId, list[Edge]]

    def cost(self, node_id: NodeId, device_id: str) -> float:
        return self.node_cost[node_id][device_id]


def cost_graph(graph: DataflowGraph, fleet: DeviceFleet) -> CostedGraph:
    """Cost every (node, device) pair. Edge weights already live on the
    edges themselves (control edges weigh 0 by construction)."""
    node_cost: dict[NodeId, dict[str, float]] = {}
    totals = {d.id: 0.0 for d in fleet}
    for node in graph.nodes:
        row = {d.id: compute_cost(node, d) for d in fleet}
        node_cost[node.id] = row
        for d in fleet:
            totals[d.id] += row[d.id]

    incoming: dict[NodeId, list[Edge]] = {n.id: [] for n in graph.nodes}
    outgoing: dict[NodeId, list[Edge]] = {n.id: [] for n in graph.nodes}
    for edge in graph.edges:
        incoming[edge.dst].append(edge)
        outgoing[edge.src].append(edge)

    return CostedGraph(
        graph=graph,
        fleet=fleet,
        node_cost=node_cost,
        total_cost_per_device_view=totals,
        incoming=incoming,
        outgoing=outgoing,
    )


def select_relocatable(
    costed: CostedGraph,
    reference_device: str,
    expensive_fraction: float = DEFAULT_EXPENSIVE_FRACTION,
) -> set[NodeId]:
    """Pick the stateless nodes worth moving.

    Ranks ALL nodes by cost on the reference device (descending, ties by
    ascending id) and keeps the prefix whose cumulative cost first reaches
    expensive_fraction of the total, then drops stateful nodes from it.
    Everything not returned is pinned: placed once, never moved again.
    """
    if not 0 < expensive_fraction <= 1:
        raise ValueError(f"expensive_fraction must be in (0, 1], got {expensive_fraction}")
    if reference_device not in {d.id for d in costed.fleet}:
        raise UnknownDevice(reference_device)

    ranked = sorted(
        costed.graph.nodes,
        key=lambda n: (-costed.cost(n.id, reference_device), node_sort_key(n.id)),
    )
    total = sum(costed.cost(n.id, reference_device) for n in ranked)
    if total <= 0:
        return set()

    budget = expensive_fraction * total
    selected: set[NodeId] = set()
    cumulative = 0.0
    for node in ranked:
        cumulative += costed.cost(node.id, reference_device)
        if not node.stateful:
            selected.add(node.id)
        if cumulative >= budget:
            break
    return selected


def tag_nodes(costed: CostedGraph, fleet: DeviceFleet) -> dict[NodeId, str]:
    """Tag every node with its dominant resource on the fleet-average device.

    Three roofline-style times are compared: op_count / mean compute
    throughput, bytes_touched / mean memory bandwidth, and total incident
    edge bytes / mean network bandwidth. The largest wins; exact ties fall
    to compute, then memory, then network.
    """
    k = len(fleet)
    mean_compute = sum(d.compute_throughput for d in fleet) / k
    mean_mem = sum(d.mem_bandwidth for d in fleet) / k
    mean_net = sum(d.net_bandwidth for d in fleet) / k

    tags: dict[NodeId, str] = {}
    for node in costed.graph.nodes:
        incident_bytes = sum(e.bytes for e in costed.incoming[node.id])
        incident_bytes += sum(e.bytes for e in costed.outgoing[node.id])
        times = (
            (node.op_count / mean_compute, COMPUTE_BOUND),
            (node.bytes_touched / mean_mem, MEMORY_BOUND),
            (incident_bytes / mean_net, NETWORK_BOUND),
        )
        best_time, best_tag = times[0]
        for t, tag in times[1:]:
            if t > best_time:
                best_time, best_tag = t, tag
        tags[node.id] = best_tag
    return tags
