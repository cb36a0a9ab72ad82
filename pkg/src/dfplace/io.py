"""JSON file formats: graph, fleet, profile, tags, assignment, move log,
trace, report.

All interchange is JSON or JSON-lines with integer byte counts and decimal
time units, written with sorted keys so identical runs produce identical
bytes. Unknown fields are rejected everywhere; diagnostics name the
offending entity. Node ids may be strings or integers in the graph file;
since JSON object keys are always strings, files keyed by node id
(assignment, tags, profile) are resolved back against the graph's ids on
load.
"""

from __future__ import annotations

import json
from typing import Any

from .cost import BOTTLENECK_TAGS, CostedGraph
from .devices import DeviceFleet, DeviceProfile
from .errors import SchemaError, UnknownDevice, UnknownNode
from .graph import EDGE_KINDS, OP_KINDS, DataflowGraph, Edge, NodeId, OperatorNode
from .partition import Assignment
from .refine import MoveRecord
from .report import Report
from .sim import SimTrace


def _no_duplicate_keys(pairs):
    seen = set()
    for key, _ in pairs:
        if key in seen:
            raise SchemaError(f"duplicate key {key!r} in JSON object")
        seen.add(key)
    return dict(pairs)


def load_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh, object_pairs_hook=_no_duplicate_keys)
        except json.JSONDecodeError as exc:
            raise SchemaError(
                f"invalid JSON in {path} at byte offset {exc.pos}: {exc.msg}"
            ) from exc


def dump_json(path: str, obj: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def dump_jsonl(path: str, objs) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objs:
            fh.write(json.dumps(obj, sort_keys=True))
            fh.write("\n")


def _require_fields(obj: dict, required: set[str], optional: set[str], entity: str) -> None:
    if not isinstance(obj, dict):
        raise SchemaError(f"{entity}: expected a JSON object, got {type(obj).__name__}")
    unknown = set(obj) - required - optional
    if unknown:
        raise SchemaError(f"{entity}: unknown field(s) {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise SchemaError(f"{entity}: missing required field(s) {sorted(missing)}")


def _exact_int(value, entity: str, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"{entity}: {field} must be an exact integer, got {value!r}")
    return value


# -- graph ------------------------------------------------------------------

def graph_from_json_obj(obj: Any) -> DataflowGraph:
    _require_fields(obj, {"nodes", "edges"}, set(), "graph file")
    if not isinstance(obj["nodes"], list) or not isinstance(obj["edges"], list):
        raise SchemaError("graph file: 'nodes' and 'edges' must be arrays")

    nodes = []
    for raw in obj["nodes"]:
        entity = f"node {raw.get('id') if isinstance(raw, dict) else raw!r}"
        _require_fields(
            raw,
            {"id", "op_kind", "op_count", "bytes_touched", "stateful"},
            {"measured_cost_us"},
            entity,
        )
        if not isinstance(raw["id"], (str, int)) or isinstance(raw["id"], bool):
            raise SchemaError(f"{entity}: id must be a string or integer")
        if raw["op_kind"] not in OP_KINDS:
            raise SchemaError(f"{entity}: op_kind must be one of {sorted(OP_KINDS)}")
        if not isinstance(raw["stateful"], bool):
            raise SchemaError(f"{entity}: stateful must be a boolean")
        measured = raw.get("measured_cost_us")
        if measured is not None and not isinstance(measured, (int, float)):
            raise SchemaError(f"{entity}: measured_cost_us must be a number")
        nodes.append(
            OperatorNode(
                id=raw["id"],
                op_kind=raw["op_kind"],
                op_count=_exact_int(raw["op_count"], entity, "op_count"),
                bytes_touched=_exact_int(raw["bytes_touched"], entity, "bytes_touched"),
                stateful=raw["stateful"],
                measured_cost_us=None if measured is None else float(measured),
            )
        )

    edges = []
    for raw in obj["edges"]:
        entity = (
            f"edge {raw.get('src')!r} -> {raw.get('dst')!r}"
            if isinstance(raw, dict)
            else f"edge {raw!r}"
        )
        _require_fields(raw, {"src", "dst", "kind", "bytes"}, set(), entity)
        if raw["kind"] not in EDGE_KINDS:
            raise SchemaError(f"{entity}: kind must be one of {sorted(EDGE_KINDS)}")
        edges.append(
            Edge(
                src=raw["src"],
                dst=raw["dst"],
                kind=raw["kind"],
                bytes=_exact_int(raw["bytes"], entity, "bytes"),
            )
        )
    return DataflowGraph(nodes=nodes, edges=edges)


def load_graph(path: str) -> DataflowGraph:
    return graph_from_json_obj(load_json(path))


# -- fleet ------------------------------------------------------------------

def fleet_from_json_obj(obj: Any) -> DeviceFleet:
    _require_fields(obj, {"devices"}, set(), "fleet file")
    if not isinstance(obj["devices"], list):
        raise SchemaError("fleet file: 'devices' must be an array")
    devices = []
    for raw in obj["devices"]:
        entity = f"device {raw.get('id') if isinstance(raw, dict) else raw!r}"
        _require_fields(
            raw,
            {"id", "compute_throughput", "mem_bandwidth", "net_bandwidth"},
            set(),
            entity,
        )
        if not isinstance(raw["id"], str):
            raise SchemaError(f"{entity}: id must be a string")
        for field in ("compute_throughput", "mem_bandwidth", "net_bandwidth"):
            if not isinstance(raw[field], (int, float)) or isinstance(raw[field], bool):
                raise SchemaError(f"{entity}: {field} must be a number")
        devices.append(
            DeviceProfile(
                id=raw["id"],
                compute_throughput=float(raw["compute_throughput"]),
                mem_bandwidth=float(raw["mem_bandwidth"]),
                net_bandwidth=float(raw["net_bandwidth"]),
            )
        )
    return DeviceFleet(devices=tuple(devices))


def load_fleet(path: str) -> DeviceFleet:
    return fleet_from_json_obj(load_json(path))


# -- node-keyed maps (profile / tags / assignment) ---------------------------

def resolve_node_key(key: str, ids: set[NodeId]) -> NodeId:
    """JSON object keys are strings; map one back to the graph's node id."""
    if key in ids:
        return key
    try:
        as_int = int(key)
    except ValueError:
        raise UnknownNode(key)
    if as_int in ids:
        return as_int
    raise UnknownNode(key)


def apply_profile(graph: DataflowGraph, obj: Any) -> DataflowGraph:
    """Return a copy of the graph with measured costs applied."""
    _require_fields(obj, {"measured_costs_us"}, set(), "profile file")
    costs = obj["measured_costs_us"]
    if not isinstance(costs, dict):
        raise SchemaError("profile file: measured_costs_us must be an object")
    ids = set(graph.node_ids())
    resolved: dict[NodeId, float] = {}
    for key, value in costs.items():
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise SchemaError(f"profile file: cost of node {key!r} must be a number")
        if value < 0:
            raise SchemaError(f"profile file: cost of node {key!r} must be >= 0")
        resolved[resolve_node_key(key, ids)] = float(value)
    nodes = [
        OperatorNode(
            id=n.id,
            op_kind=n.op_kind,
            op_count=n.op_count,
            bytes_touched=n.bytes_touched,
            stateful=n.stateful,
            measured_cost_us=resolved.get(n.id, n.measured_cost_us),
        )
        for n in graph.nodes
    ]
    return DataflowGraph(nodes=nodes, edges=list(graph.edges))


def load_profile_into(graph: DataflowGraph, path: str) -> DataflowGraph:
    return apply_profile(graph, load_json(path))


def load_tags(path: str, graph: DataflowGraph) -> dict[NodeId, str]:
    obj = load_json(path)
    if not isinstance(obj, dict):
        raise SchemaError("tags file: expected an object of node id -> tag")
    ids = set(graph.node_ids())
    tags: dict[NodeId, str] = {}
    for key, value in obj.items():
        if value not in BOTTLENECK_TAGS:
            raise SchemaError(
                f"tags file: tag of node {key!r} must be one of {sorted(BOTTLENECK_TAGS)}"
            )
        tags[resolve_node_key(key, ids)] = value
    return tags


def assignment_to_json_obj(assignment: Assignment) -> dict:
    return {str(node): dev for node, dev in assignment.placement.items()}


def load_assignment(path: str, costed: CostedGraph) -> Assignment:
    obj = load_json(path)
    if not isinstance(obj, dict):
        raise SchemaError("assignment file: expected an object of node id -> device id")
    known_devices = {d.id for d in costed.fleet}
    ids = set(costed.graph.node_ids())
    placement: dict[NodeId, str] = {}
    for key, dev in obj.items():
        node = resolve_node_key(key, ids)
        if dev not in known_devices:
            raise UnknownDevice(dev)
        placement[node] = dev
    missing = set(costed.graph.node_ids()) - set(placement)
    if missing:
        raise SchemaError(
            f"assignment file: node(s) without a device: {sorted(map(str, missing))}"
        )
    return Assignment.from_placement(placement, costed)


# -- outputs ----------------------------------------------------------------

def write_assignment(path: str, assignment: Assignment) -> None:
    dump_json(path, assignment_to_json_obj(assignment))


def write_report(path: str, report: Report) -> None:
    dump_json(path, report.to_json_obj())


def write_moves(path: str, moves: list[MoveRecord]) -> None:
    dump_jsonl(path, (m.to_json_obj() for m in moves))


def write_trace(path: str, trace: SimTrace) -> None:
    dump_jsonl(path, (e.to_json_obj() for e in trace.events))
