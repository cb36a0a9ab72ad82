"""Iterative repartitioning.

Per-node gain on a device P is D = E - I over the node's incoming data
edges: I sums bytes from sources placed on P, E sums bytes from everywhere
else, so a negative D means the node's traffic is mostly device-local. The
"symmetric" variant adds outgoing edges the same way, which makes each
accepted move provably shrink the global cut; the incoming-only default is
the faithful formulation.

A refinement pass tries one communication move per relocatable node
(ascending node id), then one balance move per node that has not already
moved this pass. Passes repeat until one makes no moves or max_passes is
reached. The heavy pass loop itself runs in a compiled kernel (see
_kernels); the single-move functions in this module are the plain-Python
reference used by tests and by anyone who wants to drive moves manually.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import KIND_BALANCE, KIND_COMMUNICATION, refine_passes
from .arrays import IndexedGraph
from .cost import CostedGraph
from .devices import DeviceFleet
from .errors import UnknownDevice, UnknownNode
from .graph import NodeId, node_sort_key
from .partition import Assignment

INCOMING_ONLY = "incoming_only"
SYMMETRIC = "symmetric"
GAIN_VARIANTS = (INCOMING_ONLY, SYMMETRIC)

DEFAULT_EPSILON_FRACTION = 0.05  # default epsilon = 0.05 * ideal share


@dataclass(frozen=True)
class RefinerConfig:
    epsilon: float
    max_passes: int = 20
    enable_balance_moves: bool = True
    gain_variant: str = INCOMING_ONLY

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.max_passes < 1:
            raise ValueError("max_passes must be >= 1")
        if self.gain_variant not in GAIN_VARIANTS:
            raise ValueError(f"gain_variant must be one of {GAIN_VARIANTS}")


@dataclass(frozen=True)
class MoveRecord:
    node: NodeId
    from_device: str
    to_device: str
    kind: str  # "communication" | "balance"
    gain_before: int
    gain_after: int
    pass_index: int

    def to_json_obj(self) -> dict:
        return {
            "node": self.node,
            "from": self.from_device,
            "to": self.to_device,
            "kind": self.kind,
            "gain_before": self.gain_before,
            "gain_after": self.gain_after,
            "pass": self.pass_index,
        }


@dataclass
class GainTable:
    """I, E, D per (relocatable node, device) under a fixed assignment."""

    internal: dict[NodeId, dict[str, int]]
    external: dict[NodeId, dict[str, int]]
    gain: dict[NodeId, dict[str, int]]


def comm_cost(
    node: NodeId,
    candidate_device: str,
    assignment: Assignment,
    costed: CostedGraph,
    gain_variant: str = INCOMING_ONLY,
) -> tuple[int, int, int]:
    """(I, E, D) for the node evaluated as if placed on candidate_device,
    every other placement fixed. Exact integer byte arithmetic."""
    if node not in costed.node_cost:
        raise UnknownNode(node)
    if candidate_device not in {d.id for d in costed.fleet}:
        raise UnknownDevice(candidate_device)

    internal = 0
    external = 0
    for edge in costed.incoming[node]:
        if assignment.placement[edge.src] == candidate_device:
            internal += edge.bytes
        else:
            external += edge.bytes
    if gain_variant == SYMMETRIC:
        for edge in costed.outgoing[node]:
            if assignment.placement[edge.dst] == candidate_device:
                internal += edge.bytes
            else:
                external += edge.bytes
    return internal, external, external - internal


def build_gain_table(
    assignment: Assignment,
    costed: CostedGraph,
    relocatable: set[NodeId],
    gain_variant: str = INCOMING_ONLY,
) -> GainTable:
    internal: dict[NodeId, dict[str, int]] = {}
    external: dict[NodeId, dict[str, int]] = {}
    gain: dict[NodeId, dict[str, int]] = {}
    for node in sorted(relocatable, key=node_sort_key):
        internal[node], external[node], gain[node] = {}, {}, {}
        for dev in costed.fleet.ids():
            i, e, d = comm_cost(node, dev, assignment, costed, gain_variant)
            internal[node][dev] = i
            external[node][dev] = e
            gain[node][dev] = d
    return GainTable(internal=internal, external=external, gain=gain)


def balance_ok(assignment: Assignment, fleet: DeviceFleet, epsilon: float) -> bool:
    """True iff every device load is within epsilon of the ideal share C/k."""
    share = assignment.total_cost / len(fleet)
    return all(abs(assignment.device_load[d.id] - share) <= epsilon for d in fleet)


def try_communication_move(
    node: NodeId,
    assignment: Assignment,
    costed: CostedGraph,
    config: RefinerConfig,
    pass_index: int = 0,
) -> MoveRecord | None:
    """Attempt a communication move for one node, mutating the
    assignment when it fires. Caller guarantees the node is relocatable.

    The move goes to the device with minimum D (ties to the lowest fleet
    index) and fires only if D strictly improves, the receiver stays within
    epsilon above the ideal share, and the donor stays within epsilon below.
    """
    fleet = costed.fleet
    gains = [
        comm_cost(node, dev, assignment, costed, config.gain_variant)[2]
        for dev in fleet.ids()
    ]
    q = fleet.index_of(assignment.placement[node])
    best = min(range(len(fleet)), key=lambda d: (gains[d], d))
    if best == q or not gains[best] < gains[q]:
        return None

    share = assignment.total_cost / len(fleet)
    dev_q = fleet.devices[q].id
    dev_r = fleet.devices[best].id
    cost_q = costed.cost(node, dev_q)
    cost_r = costed.cost(node, dev_r)
    if (assignment.device_load[dev_r] + cost_r) - share > config.epsilon:
        return None
    if share - (assignment.device_load[dev_q] - cost_q) > config.epsilon:
        return None

    _apply_move(assignment, node, dev_q, dev_r, cost_q, cost_r)
    return MoveRecord(
        node=node,
        from_device=dev_q,
        to_device=dev_r,
        kind="communication",
        gain_before=gains[q],
        gain_after=gains[best],
        pass_index=pass_index,
    )


def try_balance_move(
    node: NodeId,
    assignment: Assignment,
    costed: CostedGraph,
    config: RefinerConfig,
    pass_index: int = 0,
) -> MoveRecord | None:
    """Attempt a load-balance move for one node.

    Fires when the donor stays strictly above the ideal share after losing
    the node and some receiver stays strictly below after gaining it; among
    eligible receivers, the one landing closest to the share wins (ties to
    the lowest fleet index).
    """
    fleet = costed.fleet
    share = assignment.total_cost / len(fleet)
    dev_q = assignment.placement[node]
    q = fleet.index_of(dev_q)
    if not assignment.device_load[dev_q] - costed.cost(node, dev_q) > share:
        return None

    best = -1
    best_abs = 0.0
    for r, dev in enumerate(fleet.ids()):
        if r == q:
            continue
        after = assignment.device_load[dev] + costed.cost(node, dev)
        if after < share:
            a = abs(after - share)
            if best == -1 or a < best_abs:
                best, best_abs = r, a
    if best < 0:
        return None

    dev_r = fleet.devices[best].id
    gain_q = comm_cost(node, dev_q, assignment, costed, config.gain_variant)[2]
    gain_r = comm_cost(node, dev_r, assignment, costed, config.gain_variant)[2]
    _apply_move(assignment, node, dev_q, dev_r, costed.cost(node, dev_q), costed.cost(node, dev_r))
    return MoveRecord(
        node=node,
        from_device=dev_q,
        to_device=dev_r,
        kind="balance",
        gain_before=gain_q,
        gain_after=gain_r,
        pass_index=pass_index,
    )


def _apply_move(assignment, node, dev_q, dev_r, cost_q, cost_r):
    assignment.device_load[dev_q] -= cost_q
    assignment.device_load[dev_r] += cost_r
    assignment.total_cost += cost_r - cost_q
    assignment.placement[node] = dev_r


def refine(
    assignment: Assignment,
    costed: CostedGraph,
    fleet: DeviceFleet,
    config: RefinerConfig,
    relocatable: set[NodeId],
) -> tuple[Assignment, list[MoveRecord]]:
    """Run refinement passes until quiescent or max_passes is hit.

    The input assignment is left untouched; the refined copy and the
    ordered move log come back. Pinned (non-relocatable) nodes never move.
    A node moves at most once per pass, which rules out intra-pass
    ping-pong; at natural termination no single-node move satisfies either
    rule, so the result is locally optimal under them.
    """
    ig = IndexedGraph.from_costed(costed)
    placement = ig.placement_array(assignment)
    loads = np.array([assignment.device_load[d] for d in ig.device_ids], dtype=np.float64)
    total = float(assignment.total_cost)
    reloc = np.array(
        sorted(ig.index[n] for n in relocatable),
        dtype=np.int64,
    )

    cap = max(1, config.max_passes * len(reloc))
    mv_node = np.empty(cap, dtype=np.int64)
    mv_from = np.empty(cap, dtype=np.int64)
    mv_to = np.empty(cap, dtype=np.int64)
    mv_kind = np.empty(cap, dtype=np.int64)
    mv_gain_before = np.empty(cap, dtype=np.int64)
    mv_gain_after = np.empty(cap, dtype=np.int64)
    mv_pass = np.empty(cap, dtype=np.int64)

    n_moves = refine_passes(
        placement,
        loads,
        total,
        ig.cost,
        ig.in_ptr,
        ig.in_src,
        ig.in_bytes,
        ig.out_ptr,
        ig.out_dst,
        ig.out_bytes,
        reloc,
        float(config.epsilon),
        int(config.max_passes),
        bool(config.enable_balance_moves),
        config.gain_variant == SYMMETRIC,
        mv_node,
        mv_from,
        mv_to,
        mv_kind,
        mv_gain_before,
        mv_gain_after,
        mv_pass,
    )

    moves = [
        MoveRecord(
            node=ig.ids[int(mv_node[i])],
            from_device=ig.device_ids[int(mv_from[i])],
            to_device=ig.device_ids[int(mv_to[i])],
            kind="communication" if mv_kind[i] == KIND_COMMUNICATION else "balance",
            gain_before=int(mv_gain_before[i]),
            gain_after=int(mv_gain_after[i]),
            pass_index=int(mv_pass[i]),
        )
        for i in range(n_moves)
    ]
    refined = ig.assignment_from(placement, costed)
    return refined, moves
