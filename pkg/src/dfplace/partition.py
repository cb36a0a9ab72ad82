"""Initial placement strategies: block (topological sweep) and random."""

from __future__ import annotations

from dataclasses import dataclass, field

from .cost import CostedGraph
from .devices import DeviceFleet
from .graph import NodeId, node_sort_key, topological_sort
from .rng import Xoshiro256StarStar


@dataclass
class Assignment:
    """A total node -> device map plus cached per-device loads.

    device_load[d] is the sum of node costs on d *as costed on d*, and
    total_cost is the sum over devices, so both caches stay meaningful on
    heterogeneous fleets.
    """

    placement: dict[NodeId, str] = field(default_factory=dict)
    device_load: dict[str, float] = field(default_factory=dict)
    total_cost: float = 0.0

    def copy(self) -> "Assignment":
        return Assignment(
            placement=dict(self.placement),
            device_load=dict(self.device_load),
            total_cost=self.total_cost,
        )

    @classmethod
    def from_placement(cls, placement: dict[NodeId, str], costed: CostedGraph) -> "Assignment":
        loads = {d.id: 0.0 for d in costed.fleet}
        for node_id, dev in placement.items():
            loads[dev] += costed.cost(node_id, dev)
        return cls(placement=dict(placement), device_load=loads, total_cost=sum(loads.values()))

    def recomputed(self, costed: CostedGraph) -> "Assignment":
        """Rebuild both caches from scratch; used to cross-check cached values."""
        return Assignment.from_placement(self.placement, costed)


def block_partition(costed: CostedGraph, fleet: DeviceFleet) -> Assignment:
    """Sweep nodes in topological order, filling one device after another.

    The fill target is C_ref / k where C_ref is the whole-graph cost on the
    fleet's first device; each device keeps taking nodes (costed on itself)
    until its load first reaches the target, and the last device takes the
    remainder. On a homogeneous fleet this is exactly the ideal-share split.
    Blocks are contiguous in topological order by construction.
    """
    order = topological_sort(costed.graph)
    k = len(fleet)
    reference = fleet.devices[0].id
    target = costed.total_cost_per_device_view[reference] / k

    placement: dict[NodeId, str] = {}
    dev_index = 0
    running = 0.0
    for node_id in order:
        dev = fleet.devices[dev_index].id
        placement[node_id] = dev
        running += costed.cost(node_id, dev)
        if running >= target and dev_index < k - 1:
            dev_index += 1
            running = 0.0
    return Assignment.from_placement(placement, costed)


def random_partition(costed: CostedGraph, fleet: DeviceFleet, seed: int) -> Assignment:
    """Place each node independently and uniformly at random.

    Nodes are drawn in ascending node-id order from the pinned xoshiro256**
    stream (see rng module), so one seed gives the same placement on every
    platform.
    """
    rng = Xoshiro256StarStar(seed)
    k = len(fleet)
    placement: dict[NodeId, str] = {}
    for node_id in sorted(costed.graph.node_ids(), key=node_sort_key):
        placement[node_id] = fleet.devices[rng.next_below(k)].id
    return Assignment.from_placement(placement, costed)


def cut_size(costed: CostedGraph, assignment: Assignment) -> int:
    """Total bytes on edges whose endpoints live on different devices."""
    total = 0
    for edge in costed.graph.edges:
        if assignment.placement[edge.src] != assignment.placement[edge.dst]:
            total += edge.bytes
    return total
