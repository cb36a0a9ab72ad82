"""Refinement pass kernels: a numba-compiled scalar loop and a pure-numpy
fallback with identical observable behavior.

The pass loop is inherently sequential (every accepted move changes the
loads and placements the next candidate sees), which is why the fast path
is a compiled scalar loop rather than a vectorized expression. Selection:

  * default: numba @njit kernel (compiled on first use, cached on disk)
  * DFPLACE_PURE_NUMPY=1, or numba missing: the numpy fallback

Both twins take the same flat arrays, apply identical update expressions in
identical order, and write the same move log, so results match bit for bit.
Gains are exact int64 byte arithmetic; loads are float64.

Move log encoding: kind 0 = communication move, 1 = balance move.
"""

from __future__ import annotations

import os

import numpy as np

KIND_COMMUNICATION = 0
KIND_BALANCE = 1


def _refine_passes_loops(
    placement,
    loads,
    total,
    cost,
    in_ptr,
    in_src,
    in_bytes,
    out_ptr,
    out_dst,
    out_bytes,
    reloc,
    epsilon,
    max_passes,
    enable_balance,
    symmetric,
    mv_node,
    mv_from,
    mv_to,
    mv_kind,
    mv_gain_before,
    mv_gain_after,
    mv_pass,
):
    n = placement.shape[0]
    k = loads.shape[0]
    acc = np.zeros(k, dtype=np.int64)
    moved_this_pass = np.zeros(n, dtype=np.uint8)
    n_moves = 0

    for pass_index in range(max_passes):
        moved_any = False
        for i in range(n):
            moved_this_pass[i] = 0

        # Communication moves: relocate to the device with minimum gain D
        # when D strictly improves and both epsilon guards hold.
        for ii in range(reloc.shape[0]):
            node = reloc[ii]
            q = placement[node]
            for d in range(k):
                acc[d] = 0
            tot = np.int64(0)
            for e in range(in_ptr[node], in_ptr[node + 1]):
                b = in_bytes[e]
                acc[placement[in_src[e]]] += b
                tot += b
            if symmetric:
                for e in range(out_ptr[node], out_ptr[node + 1]):
                    b = out_bytes[e]
                    acc[placement[out_dst[e]]] += b
                    tot += b
            best = 0
            best_gain = tot - 2 * acc[0]
            for d in range(1, k):
                g = tot - 2 * acc[d]
                if g < best_gain:
                    best_gain = g
                    best = d
            gain_q = tot - 2 * acc[q]
            if best != q and best_gain < gain_q:
                share = total / k
                if (loads[best] + cost[node, best]) - share <= epsilon and share - (
                    loads[q] - cost[node, q]
                ) <= epsilon:
                    loads[q] = loads[q] - cost[node, q]
                    loads[best] = loads[best] + cost[node, best]
                    total = total - cost[node, q] + cost[node, best]
                    placement[node] = best
                    mv_node[n_moves] = node
                    mv_from[n_moves] = q
                    mv_to[n_moves] = best
                    mv_kind[n_moves] = KIND_COMMUNICATION
                    mv_gain_before[n_moves] = gain_q
                    mv_gain_after[n_moves] = best_gain
                    mv_pass[n_moves] = pass_index
                    n_moves += 1
                    moved_this_pass[node] = 1
                    moved_any = True

        # Balance moves: donor must stay strictly above the ideal share,
        # receiver strictly below; best receiver lands closest to the share.
        if enable_balance:
            for ii in range(reloc.shape[0]):
                node = reloc[ii]
                if moved_this_pass[node] == 1:
                    continue
                q = placement[node]
                share = total / k
                if not loads[q] - cost[node, q] > share:
                    continue
                best = -1
                best_abs = 0.0
                for r in range(k):
                    if r == q:
                        continue
                    after = loads[r] + cost[node, r]
                    if after < share:
                        a = abs(after - share)
                        if best == -1 or a < best_abs:
                            best = r
                            best_abs = a
                if best >= 0:
                    for d in range(k):
                        acc[d] = 0
                    tot = np.int64(0)
                    for e in range(in_ptr[node], in_ptr[node + 1]):
                        b = in_bytes[e]
                        acc[placement[in_src[e]]] += b
                        tot += b
                    if symmetric:
                        for e in range(out_ptr[node], out_ptr[node + 1]):
                            b = out_bytes[e]
                            acc[placement[out_dst[e]]] += b
                            tot += b
                    loads[q] = loads[q] - cost[node, q]
                    loads[best] = loads[best] + cost[node, best]
                    total = total - cost[node, q] + cost[node, best]
                    placement[node] = best
                    mv_node[n_moves] = node
                    mv_from[n_moves] = q
                    mv_to[n_moves] = best
                    mv_kind[n_moves] = KIND_BALANCE
                    mv_gain_before[n_moves] = tot - 2 * acc[q]
                    mv_gain_after[n_moves] = tot - 2 * acc[best]
                    mv_pass[n_moves] = pass_index
                    n_moves += 1
                    moved_this_pass[node] = 1
                    moved_any = True

        if not moved_any:
            break

    return n_moves


def _node_gain_vector(placement, in_ptr, in_src, in_bytes, out_ptr, out_dst, out_bytes, node, k, symmetric):
    """Gain D per device for one node: D[d] = tot - 2 * same_device_bytes[d]."""
    acc = np.zeros(k, dtype=np.int64)
    lo, hi = in_ptr[node], in_ptr[node + 1]
    np.add.at(acc, placement[in_src[lo:hi]], in_bytes[lo:hi])
    tot = int(in_bytes[lo:hi].sum())
    if symmetric:
        lo, hi = out_ptr[node], out_ptr[node + 1]
        np.add.at(acc, placement[out_dst[lo:hi]], out_bytes[lo:hi])
        tot += int(out_bytes[lo:hi].sum())
    return tot - 2 * acc, tot


def refine_passes_numpy(
    placement,
    loads,
    total,
    cost,
    in_ptr,
    in_src,
    in_bytes,
    out_ptr,
    out_dst,
    out_bytes,
    reloc,
    epsilon,
    max_passes,
    enable_balance,
    symmetric,
    mv_node,
    mv_from,
    mv_to,
    mv_kind,
    mv_gain_before,
    mv_gain_after,
    mv_pass,
):
    """Pure-numpy twin of the compiled kernel (same contract, same results)."""
    n = placement.shape[0]
    k = loads.shape[0]
    moved_this_pass = np.zeros(n, dtype=np.uint8)
    n_moves = 0

    for pass_index in range(max_passes):
        moved_any = False
        moved_this_pass[:] = 0

        for node in reloc:
            q = int(placement[node])
            gains, _ = _node_gain_vector(
                placement, in_ptr, in_src, in_bytes, out_ptr, out_dst, out_bytes, node, k, symmetric
            )
            best = int(np.argmin(gains))
            best_gain = int(gains[best])
            gain_q = int(gains[q])
            if best != q and best_gain < gain_q:
                share = total / k
                if (loads[best] + cost[node, best]) - share <= epsilon and share - (
                    loads[q] - cost[node, q]
                ) <= epsilon:
                    loads[q] = loads[q] - cost[node, q]
                    loads[best] = loads[best] + cost[node, best]
                    total = total - cost[node, q] + cost[node, best]
                    placement[node] = best
                    mv_node[n_moves] = node
                    mv_from[n_moves] = q
                    mv_to[n_moves] = best
                    mv_kind[n_moves] = KIND_COMMUNICATION
                    mv_gain_before[n_moves] = gain_q
                    mv_gain_after[n_moves] = best_gain
                    mv_pass[n_moves] = pass_index
                    n_moves += 1
                    moved_this_pass[node] = 1
                    moved_any = True

        if enable_balance:
            for node in reloc:
                if moved_this_pass[node]:
                    continue
                q = int(placement[node])
                share = total / k
                if not loads[q] - cost[node, q] > share:
                    continue
                after = loads + cost[node, :]
                eligible = after < share
                eligible[q] = False
                if not eligible.any():
                    continue
                resid = np.abs(after - share)
                resid[~eligible] = np.inf
                best = int(np.argmin(resid))
                gains, _ = _node_gain_vector(
                    placement, in_ptr, in_src, in_bytes, out_ptr, out_dst, out_bytes, node, k, symmetric
                )
                loads[q] = loads[q] - cost[node, q]
                loads[best] = loads[best] + cost[node, best]
                total = total - cost[node, q] + cost[node, best]
                placement[node] = best
                mv_node[n_moves] = node
                mv_from[n_moves] = q
                mv_to[n_moves] = best
                mv_kind[n_moves] = KIND_BALANCE
                mv_gain_before[n_moves] = int(gains[q])
                mv_gain_after[n_moves] = int(gains[best])
                mv_pass[n_moves] = pass_index
                n_moves += 1
                moved_this_pass[node] = 1
                moved_any = True

        if not moved_any:
            break

    return n_moves


# Both twins stay importable for benchmarks and equivalence tests; the env
# flag only decides which one refine() dispatches to.
try:
    from numba import njit as _njit

    refine_passes_numba = _njit(cache=True)(_refine_passes_loops)
    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    refine_passes_numba = None
    HAS_NUMBA = False

_FORCE_NUMPY = os.environ.get("DFPLACE_PURE_NUMPY", "").strip() not in ("", "0")
USING_NUMBA = HAS_NUMBA and not _FORCE_NUMPY
refine_passes = refine_passes_numba if USING_NUMBA else refine_passes_numpy
