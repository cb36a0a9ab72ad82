"""Shared builders for test instances.

Deliberately only *generators* live here; every oracle (brute-force gain
scan, cut recomputation, trace replay) stays inside the test module that
uses it so it cannot drift into the implementation.
"""

from __future__ import annotations

import random

from dfplace import DataflowGraph, DeviceFleet, DeviceProfile, Edge, OperatorNode, validate_graph

KINDS = ("matmul", "conv2d", "elementwise", "reduction", "opaque")


def node(nid, ops=0, stateful=False, kind="elementwise", touched=0, measured=None):
    return OperatorNode(
        id=nid,
        op_kind=kind,
        op_count=ops,
        bytes_touched=touched,
        stateful=stateful,
        measured_cost_us=measured,
    )


def graph(nodes, edges):
    return validate_graph(DataflowGraph(nodes=list(nodes), edges=list(edges)))


def homogeneous_fleet(k, compute=100.0, mem=1e4, net=1e3):
    return DeviceFleet(
        tuple(DeviceProfile(f"d{j}", compute, mem, net) for j in range(k))
    )


def heterogeneous_fleet(k, rnd: random.Random):
    return DeviceFleet(
        tuple(
            DeviceProfile(
                f"d{j}",
                compute_throughput=rnd.choice((50.0, 100.0, 200.0)),
                mem_bandwidth=rnd.choice((5e3, 1e4, 2e4)),
                net_bandwidth=rnd.choice((5e2, 1e3, 2e3)),
            )
            for j in range(k)
        )
    )


def random_graph(
    rnd: random.Random,
    max_nodes=12,
    max_edges=30,
    stateful_p=0.2,
    control_p=0.1,
    max_bytes=64,
    max_ops=2000,
):
    """Random DAG: edges only go forward in id order, so it is acyclic."""
    n = rnd.randint(2, max_nodes)
    nodes = []
    for i in range(n):
        stateful = rnd.random() < stateful_p
        kind = "variable" if stateful and rnd.random() < 0.3 else rnd.choice(KINDS)
        nodes.append(
            OperatorNode(
                id=f"n{i:03d}",
                op_kind=kind,
                op_count=rnd.randint(0, max_ops),
                bytes_touched=rnd.randint(0, 4096),
                stateful=stateful,
            )
        )
    edges = []
    for _ in range(rnd.randint(0, max_edges)):
        i = rnd.randrange(0, n - 1)
        j = rnd.randrange(i + 1, n)
        if rnd.random() < control_p:
            edges.append(Edge(src=f"n{i:03d}", dst=f"n{j:03d}", kind="control", bytes=0))
        else:
            edges.append(
                Edge(src=f"n{i:03d}", dst=f"n{j:03d}", kind="data", bytes=rnd.randint(0, max_bytes))
            )
    return graph(nodes, edges)
