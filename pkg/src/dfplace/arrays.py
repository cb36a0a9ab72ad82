"""Flat-array view of a costed graph for the hot kernels.

Node index = position in ascending node-id order, so iterating indices 0..n
is exactly the "ascending NodeId" order the move rules require. Device
index = position in the fleet. Edge lists are stored CSR-style, once keyed
by destination (incoming) and once by source (outgoing); control edges are
dropped since they weigh 0 in every sum they would enter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cost import CostedGraph
from .graph import NodeId, node_sort_key
from .partition import Assignment


@dataclass
class IndexedGraph:
    ids: list[NodeId]
    index: dict[NodeId, int]
    device_ids: list[str]
    cost: np.ndarray          # (n, k) float64, node cost per device
    op_count: np.ndarray      # (n,) int64
    bytes_touched: np.ndarray  # (n,) int64
    stateful: np.ndarray      # (n,) bool
    in_ptr: np.ndarray        # (n+1,) int64 CSR offsets into in_src/in_bytes
    in_src: np.ndarray        # (m,) int64
    in_bytes: np.ndarray      # (m,) int64
    out_ptr: np.ndarray
    out_dst: np.ndarray
    out_bytes: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.ids)

    @property
    def n_devices(self) -> int:
        return len(self.device_ids)

    @classmethod
    def from_costed(cls, costed: CostedGraph) -> "IndexedGraph":
        ids = sorted(costed.graph.node_ids(), key=node_sort_key)
        index = {nid: i for i, nid in enumerate(ids)}
        device_ids = costed.fleet.ids()
        n, k = len(ids), len(device_ids)

        cost = np.zeros((n, k), dtype=np.float64)
        op_count = np.zeros(n, dtype=np.int64)
        bytes_touched = np.zeros(n, dtype=np.int64)
        stateful = np.zeros(n, dtype=bool)
        for node in costed.graph.nodes:
            i = index[node.id]
            row = costed.node_cost[node.id]
            for j, dev in enumerate(device_ids):
                cost[i, j] = row[dev]
            op_count[i] = node.op_count
            bytes_touched[i] = node.bytes_touched
            stateful[i] = node.stateful

        data_edges = [e for e in costed.graph.edges if e.kind == "data"]
        src = np.array([index[e.src] for e in data_edges], dtype=np.int64)
        dst = np.array([index[e.dst] for e in data_edges], dtype=np.int64)
        wei = np.array([e.bytes for e in data_edges], dtype=np.int64)

        in_ptr, in_src, in_bytes = _csr(dst, src, wei, n)
        out_ptr, out_dst, out_bytes = _csr(src, dst, wei, n)
        return cls(
            ids=ids,
            index=index,
            device_ids=device_ids,
            cost=cost,
            op_count=op_count,
            bytes_touched=bytes_touched,
            stateful=stateful,
            in_ptr=in_ptr,
            in_src=in_src,
            in_bytes=in_bytes,
            out_ptr=out_ptr,
            out_dst=out_dst,
            out_bytes=out_bytes,
        )

    def placement_array(self, assignment: Assignment) -> np.ndarray:
        dev_index = {d: j for j, d in enumerate(self.device_ids)}
        out = np.empty(self.n_nodes, dtype=np.int64)
        for nid, dev in assignment.placement.items():
            out[self.index[nid]] = dev_index[dev]
        return out

    def assignment_from(self, placement: np.ndarray, costed: CostedGraph) -> Assignment:
        mapping = {
            self.ids[i]: self.device_ids[int(placement[i])] for i in range(self.n_nodes)
        }
        return Assignment.from_placement(mapping, costed)


def _csr(keys: np.ndarray, values: np.ndarray, weights: np.ndarray, n: int):
    """Group (values, weights) by key into CSR arrays of length n."""
    order = np.argsort(keys, kind="stable")
    counts = np.bincount(keys, minlength=n) if len(keys) else np.zeros(n, dtype=np.int64)
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    return ptr, values[order].astype(np.int64), weights[order].astype(np.int64)
