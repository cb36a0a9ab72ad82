#!/usr/bin/env python3
"""Benchmark the refinement kernel: numba @njit vs the pure-numpy fallback.

Builds a random layered DAG, runs identical refinement passes through both
kernels, verifies they produce identical placements and move logs, and
reports wall time. The numba path is also what you get by default from
dfplace.refine(); set DFPLACE_PURE_NUMPY=1 to force the fallback there.

Usage:
    python benchmarks/bench_refine.py [--nodes 20000] [--edges 60000]
                                      [--devices 4] [--passes 8] [--seed 0]
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from dfplace import (
    DataflowGraph,
    DeviceFleet,
    DeviceProfile,
    Edge,
    OperatorNode,
    cost_graph,
    select_relocatable,
    validate_graph,
)
from dfplace._kernels import HAS_NUMBA, refine_passes_numba, refine_passes_numpy
from dfplace.arrays import IndexedGraph
from dfplace.partition import Assignment


def build_instance(n_nodes, n_edges, k, seed):
    rnd = random.Random(seed)
    nodes = [
        OperatorNode(
            id=f"n{i:06d}",
            op_kind="matmul",
            op_count=rnd.randint(100, 20000),
            bytes_touched=rnd.randint(0, 4096),
            stateful=rnd.random() < 0.05,
        )
        for i in range(n_nodes)
    ]
    edges = []
    for _ in range(n_edges):
        i = rnd.randrange(0, n_nodes - 1)
        j = rnd.randrange(i + 1, n_nodes)
        edges.append(Edge(src=f"n{i:06d}", dst=f"n{j:06d}", kind="data", bytes=rnd.randint(1, 256)))
    graph = validate_graph(DataflowGraph(nodes=nodes, edges=edges))
    fleet = DeviceFleet(
        tuple(DeviceProfile(f"d{j}", 1000.0, 1e6, 1e5) for j in range(k))
    )
    costed = cost_graph(graph, fleet)
    mapping = {n: fleet.ids()[rnd.randrange(k)] for n in graph.node_ids()}
    return costed, Assignment.from_placement(mapping, costed)


def run_kernel(kernel, ig, placement0, loads0, total0, reloc, epsilon, max_passes):
    placement = placement0.copy()
    loads = loads0.copy()
    cap = max(1, max_passes * len(reloc))
    logs = [np.empty(cap, dtype=np.int64) for _ in range(7)]
    start = time.perf_counter()
    n_moves = kernel(
        placement, loads, total0, ig.cost,
        ig.in_ptr, ig.in_src, ig.in_bytes, ig.out_ptr, ig.out_dst, ig.out_bytes,
        reloc, epsilon, max_passes, True, False, *logs,
    )
    elapsed = time.perf_counter() - start
    return elapsed, n_moves, placement, [log[:n_moves] for log in logs]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=20000)
    ap.add_argument("--edges", type=int, default=60000)
    ap.add_argument("--devices", type=int, default=4)
    ap.add_argument("--passes", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"building instance: {args.nodes} nodes, {args.edges} edges, {args.devices} devices")
    costed, asg = build_instance(args.nodes, args.edges, args.devices, args.seed)
    ig = IndexedGraph.from_costed(costed)
    placement0 = ig.placement_array(asg)
    loads0 = np.array([asg.device_load[d] for d in ig.device_ids])
    reloc = np.array(
        sorted(ig.index[n] for n in select_relocatable(costed, ig.device_ids[0], 1.0)),
        dtype=np.int64,
    )
    epsilon = 0.10 * asg.total_cost / args.devices
    print(f"relocatable nodes: {len(reloc)}, epsilon: {epsilon:.2f}")

    results = {}
    if HAS_NUMBA:
        # compile outside the timed region
        run_kernel(refine_passes_numba, ig, placement0, loads0, asg.total_cost, reloc, epsilon, 1)
        results["numba"] = run_kernel(
            refine_passes_numba, ig, placement0, loads0, asg.total_cost, reloc, epsilon, args.passes
        )
    else:
        print("numba not available; benchmarking the fallback only")
    results["numpy"] = run_kernel(
        refine_passes_numpy, ig, placement0, loads0, asg.total_cost, reloc, epsilon, args.passes
    )

    for name, (elapsed, n_moves, _, _) in results.items():
        print(f"{name:>6}: {elapsed * 1e3:9.1f} ms   ({n_moves} moves)")
    if "numba" in results:
        _, nm_moves, nm_place, nm_logs = results["numba"]
        _, np_moves, np_place, np_logs = results["numpy"]
        same = (
            nm_moves == np_moves
            and np.array_equal(nm_place, np_place)
            and all(np.array_equal(a, b) for a, b in zip(nm_logs, np_logs))
        )
        print(f"outputs identical: {same}")
        print(f"speedup: {results['numpy'][0] / results['numba'][0]:.1f}x")
        if not same:
            raise SystemExit("kernel outputs diverged")


if __name__ == "__main__":
    main()
