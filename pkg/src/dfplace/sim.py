"""Discrete-window simulation of the hardware scheduling assistants.

Execution model: residency is fixed within a window; each window runs
steps_per_iteration training steps, and a resident node contributes, per
step, its compute cost, bytes_touched / mem_bandwidth, and (cross-device
incident edge bytes) / net_bandwidth to its device's busy time. Utilization
per resource is busy time over window length, clamped to 1. Out-boxed
nodes do no work and contribute nothing anywhere.

At every window boundary, in this order: step_complete events, one
window_sample per (device ascending, resource in compute/memory/network
order), all overload rules in that same order, then all underload rules.
A device whose utilization strictly exceeds theta parks its costliest
matching-tag node in the per-resource out-box (capacity one); a device
strictly below gamma claims from the most-loaded peer box. A box survives
exactly one full window: a node put at boundary w can be claimed at w or
at w+1, and after the take phase of boundary w+1 it silently returns to
its source device (no trace event; replays must mirror this rule). All
out-boxed nodes return home at the horizon.

A node acquired at boundary w is in cooldown through boundary
w + cooldown, i.e. it becomes out-box eligible again at w + cooldown + 1.
Single-device fleets skip the migration phases entirely (no peer to trade
with). The rule set is fully deterministic; the seed parameter is accepted
for interface stability but currently unused.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .arrays import IndexedGraph
from .cost import BOTTLENECK_TAGS, COMPUTE_BOUND, MEMORY_BOUND, NETWORK_BOUND, CostedGraph
from .devices import DeviceFleet, DeviceProfile
from .errors import UntaggedRelocatableNode
from .graph import NodeId, node_sort_key
from .partition import Assignment

RESOURCES = ("compute", "memory", "network")
_TAG_FOR_RESOURCE = {
    "compute": COMPUTE_BOUND,
    "memory": MEMORY_BOUND,
    "network": NETWORK_BOUND,
}

EVENT_WINDOW_SAMPLE = "window_sample"
EVENT_OUTBOX_PUT = "outbox_put"
EVENT_OUTBOX_TAKE = "outbox_take"
EVENT_STEP_COMPLETE = "step_complete"


@dataclass(frozen=True)
class SimConfig:
    theta: float = 0.95
    gamma: float = 0.50
    window: float = 10.0
    cooldown: int = 2
    horizon: float = 100.0
    steps_per_iteration: int = 1

    def __post_init__(self):
        if not 0 < self.theta <= 1:
            raise ValueError("theta must be in (0, 1]")
        if not 0 <= self.gamma < 1:
            raise ValueError("gamma must be in [0, 1)")
        if not self.gamma < self.theta:
            raise ValueError("gamma must be < theta")
        if not self.window > 0:
            raise ValueError("window must be > 0")
        if self.cooldown < 0:
            raise ValueError("cooldown must be >= 0")
        if not self.horizon > 0:
            raise ValueError("horizon must be > 0")
        if self.steps_per_iteration < 1:
            raise ValueError("steps_per_iteration must be >= 1")


@dataclass(frozen=True)
class TraceEvent:
    t: float
    kind: str
    device: str | None = None
    node: NodeId | None = None
    resource: str | None = None
    utilization: float | None = None

    def to_json_obj(self) -> dict:
        return {
            "t": self.t,
            "kind": self.kind,
            "device": self.device,
            "node": self.node,
            "resource": self.resource,
            "utilization": self.utilization,
        }


@dataclass
class SimTrace:
    events: list[TraceEvent] = field(default_factory=list)

    def count(self, kind: str) -> int:
        return sum(1 for e in self.events if e.kind == kind)

    @property
    def migration_count(self) -> int:
        return self.count(EVENT_OUTBOX_TAKE)


@dataclass
class DeviceState:
    """Mutable per-device simulation state."""

    device: DeviceProfile
    index: int
    resident_nodes: set[NodeId]
    outboxes: dict[str, NodeId | None] = field(
        default_factory=lambda: {r: None for r in RESOURCES}
    )
    outbox_since: dict[str, int] = field(default_factory=dict)
    utilization: dict[str, float] = field(
        default_factory=lambda: {r: 0.0 for r in RESOURCES}
    )


def overload_rule(
    state: DeviceState,
    resource: str,
    tags: dict[NodeId, str],
    config: SimConfig,
    node_time: dict[NodeId, float],
    relocatable: set[NodeId],
    cooldown_until: dict[NodeId, int],
    window_index: int,
) -> NodeId | None:
    """Park the costliest matching node in the out-box when over theta.

    Fires only if the box is empty and some resident relocatable node
    carries the resource's tag and is out of cooldown. Victim: highest
    node_time, ties to the lowest node id. Returns the parked node or None.
    """
    if not state.utilization[resource] > config.theta:
        return None
    if state.outboxes[resource] is not None:
        return None
    wanted = _TAG_FOR_RESOURCE[resource]
    candidates = [
        n
        for n in state.resident_nodes
        if n in relocatable
        and tags.get(n) == wanted
        and window_index > cooldown_until.get(n, 0)
    ]
    if not candidates:
        return None
    victim = min(candidates, key=lambda n: (-node_time[n], node_sort_key(n)))
    state.resident_nodes.discard(victim)
    state.outboxes[resource] = victim
    state.outbox_since[resource] = window_index
    return victim


def underload_rule(
    state: DeviceState,
    all_devices: list[DeviceState],
    resource: str,
    config: SimConfig,
    cooldown_until: dict[NodeId, int],
    window_index: int,
) -> tuple[DeviceState, NodeId] | None:
    """Claim a node from a peer's out-box when under gamma.

    Donor: the peer with the highest utilization on that resource among
    those with a non-empty box (ties to the lowest device index). The node
    becomes resident here and starts its cooldown. Returns (donor, node).
    """
    if not state.utilization[resource] < config.gamma:
        return None
    donors = [
        d for d in all_devices if d.index != state.index and d.outboxes[resource] is not None
    ]
    if not donors:
        return None
    donor = min(donors, key=lambda d: (-d.utilization[resource], d.index))
    node = donor.outboxes[resource]
    donor.outboxes[resource] = None
    donor.outbox_since.pop(resource, None)
    state.resident_nodes.add(node)
    cooldown_until[node] = window_index + config.cooldown
    return donor, node


def simulate(
    costed: CostedGraph,
    tags: dict[NodeId, str],
    assignment: Assignment,
    fleet: DeviceFleet,
    config: SimConfig,
    relocatable: set[NodeId],
    seed: int = 0,
) -> tuple[Assignment, SimTrace]:
    """Run the window loop over floor(horizon / window) windows.

    Returns the final assignment (out-boxed nodes back home) and the full
    event trace. Deterministic for identical inputs.
    """
    for n in sorted(relocatable, key=node_sort_key):
        if tags.get(n) not in BOTTLENECK_TAGS:
            raise UntaggedRelocatableNode(n)

    ig = IndexedGraph.from_costed(costed)
    k = len(fleet)
    placement = ig.placement_array(assignment)  # device index, -1 while boxed

    states = [
        DeviceState(device=d, index=j, resident_nodes=set())
        for j, d in enumerate(fleet.devices)
    ]
    for nid, dev in assignment.placement.items():
        states[fleet.index_of(dev)].resident_nodes.add(nid)

    # Flat edge arrays for the per-window cross-traffic computation.
    edge_src = np.repeat(np.arange(ig.n_nodes, dtype=np.int64), np.diff(ig.out_ptr))
    edge_dst = ig.out_dst
    edge_bytes = ig.out_bytes

    mem_bw = np.array([d.mem_bandwidth for d in fleet], dtype=np.float64)
    net_bw = np.array([d.net_bandwidth for d in fleet], dtype=np.float64)

    cooldown_until: dict[NodeId, int] = {}
    trace = SimTrace()
    n_windows = int(config.horizon // config.window)

    for w in range(1, n_windows + 1):
        t = w * config.window
        comp_busy, mem_busy, net_busy, node_net_time = _window_busy(
            ig, placement, edge_src, edge_dst, edge_bytes, mem_bw, net_bw, k, config
        )
        for state in states:
            j = state.index
            state.utilization = {
                "compute": min(1.0, comp_busy[j] / config.window),
                "memory": min(1.0, mem_busy[j] / config.window),
                "network": min(1.0, net_busy[j] / config.window),
            }

        for _ in range(config.steps_per_iteration):
            trace.events.append(TraceEvent(t=t, kind=EVENT_STEP_COMPLETE))
        for state in states:
            for res in RESOURCES:
                trace.events.append(
                    TraceEvent(
                        t=t,
                        kind=EVENT_WINDOW_SAMPLE,
                        device=state.device.id,
                        resource=res,
                        utilization=state.utilization[res],
                    )
                )

        if k > 1:
            for state in states:
                for res in RESOURCES:
                    node_time = _node_resource_time(ig, state, res, node_net_time)
                    victim = overload_rule(
                        state, res, tags, config, node_time, relocatable, cooldown_until, w
                    )
                    if victim is not None:
                        placement[ig.index[victim]] = -1
                        trace.events.append(
                            TraceEvent(
                                t=t,
                                kind=EVENT_OUTBOX_PUT,
                                device=state.device.id,
                                node=victim,
                                resource=res,
                                utilization=state.utilization[res],
                            )
                        )
            for state in states:
                for res in RESOURCES:
                    taken = underload_rule(state, states, res, config, cooldown_until, w)
                    if taken is not None:
                        donor, node = taken
                        placement[ig.index[node]] = state.index
                        trace.events.append(
                            TraceEvent(
                                t=t,
                                kind=EVENT_OUTBOX_TAKE,
                                device=state.device.id,
                                node=node,
                                resource=res,
                                utilization=state.utilization[res],
                            )
                        )
            # Unclaimed boxes from the previous boundary go home silently.
            for state in states:
                for res in RESOURCES:
                    node = state.outboxes[res]
                    if node is not None and state.outbox_since[res] < w:
                        _return_home(state, res, placement, ig)

    for state in states:
        for res in RESOURCES:
            if state.outboxes[res] is not None:
                _return_home(state, res, placement, ig)

    final = ig.assignment_from(placement, costed)
    return final, trace


def _return_home(state, res, placement, ig):
    node = state.outboxes[res]
    state.outboxes[res] = None
    state.outbox_since.pop(res, None)
    state.resident_nodes.add(node)
    placement[ig.index[node]] = state.index


def _window_busy(ig, placement, edge_src, edge_dst, edge_bytes, mem_bw, net_bw, k, config):
    """Per-device busy time this window, plus per-node network time."""
    steps = config.steps_per_iteration
    resident = placement >= 0
    pl = np.where(resident, placement, 0)

    comp = np.bincount(
        pl[resident], weights=ig.cost[np.arange(ig.n_nodes), pl][resident], minlength=k
    )
    mem_bytes = np.bincount(
        pl[resident], weights=ig.bytes_touched.astype(np.float64)[resident], minlength=k
    )

    node_cross = np.zeros(ig.n_nodes, dtype=np.float64)
    dev_cross = np.zeros(k, dtype=np.float64)
    if len(edge_src):
        both = resident[edge_src] & resident[edge_dst]
        crossing = both & (placement[edge_src] != placement[edge_dst])
        if crossing.any():
            b = edge_bytes[crossing].astype(np.float64)
            np.add.at(node_cross, edge_src[crossing], b)
            np.add.at(node_cross, edge_dst[crossing], b)
            np.add.at(dev_cross, placement[edge_src[crossing]], b)
            np.add.at(dev_cross, placement[edge_dst[crossing]], b)

    comp_busy = steps * comp
    mem_busy = steps * mem_bytes / mem_bw
    net_busy = steps * dev_cross / net_bw
    node_net_time = node_cross  # per-node cross bytes; divided per device later
    return comp_busy, mem_busy, net_busy, node_net_time


def _node_resource_time(ig, state, resource, node_net_time):
    """Per-step resource time of this device's residents (victim ranking)."""
    j = state.index
    out: dict[NodeId, float] = {}
    for n in state.resident_nodes:
        i = ig.index[n]
        if resource == "compute":
            out[n] = float(ig.cost[i, j])
        elif resource == "memory":
            out[n] = float(ig.bytes_touched[i]) / state.device.mem_bandwidth
        else:
            out[n] = float(node_net_time[i]) / state.device.net_bandwidth
    return out


def makespan(costed: CostedGraph, assignment: Assignment, fleet: DeviceFleet) -> float:
    """Per-iteration critical device time: max over devices of resident
    compute time plus cut-edge bytes on that device's links / net rate."""
    compute = {d.id: 0.0 for d in fleet}
    cross = {d.id: 0 for d in fleet}
    for node_id, dev in assignment.placement.items():
        compute[dev] += costed.cost(node_id, dev)
    for edge in costed.graph.edges:
        a, b = assignment.placement[edge.src], assignment.placement[edge.dst]
        if a != b:
            cross[a] += edge.bytes
            cross[b] += edge.bytes
    return max(
        (compute[d.id] + cross[d.id] / d.net_bandwidth for d in fleet),
        default=0.0,
    )
