"""Command-line front end: partition | refine | simulate | pipeline.

Exit codes: 0 success, 1 I/O failure, 2 schema/validation failure.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import io
from .cost import DEFAULT_EXPENSIVE_FRACTION, cost_graph, select_relocatable, tag_nodes
from .errors import DfplaceError
from .graph import validate_graph
from .partition import Assignment, block_partition, cut_size, random_partition
from .refine import DEFAULT_EPSILON_FRACTION, GAIN_VARIANTS, INCOMING_ONLY, RefinerConfig, refine
from .report import Report, build_report
from .sim import SimConfig, makespan, simulate

_DOT_COLORS = (
    "lightblue", "lightsalmon", "palegreen", "khaki", "plum",
    "lightgrey", "orange", "cyan", "pink", "yellowgreen",
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dfplace",
        description="Partition dataflow graphs across devices, refine the cut, "
        "and simulate threshold-driven runtime rebalancing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", required=True, help="graph JSON file")
    common.add_argument("--fleet", required=True, help="fleet JSON file")
    common.add_argument("--out-dir", default="out", help="output directory")
    common.add_argument("--profile", help="measured-costs JSON file")

    select = argparse.ArgumentParser(add_help=False)
    select.add_argument(
        "--expensive-fraction",
        type=float,
        default=DEFAULT_EXPENSIVE_FRACTION,
        help="cumulative cost fraction defining 'expensive' nodes",
    )
    select.add_argument(
        "--reference-device",
        help="device whose costs rank nodes for selection (default: first in fleet)",
    )

    strategy = argparse.ArgumentParser(add_help=False)
    strategy.add_argument("--strategy", choices=("block", "random"), default="block")
    strategy.add_argument("--seed", type=int, default=0, help="random-partition seed")
    strategy.add_argument("--dot", action="store_true", help="also write graph.dot")

    refiner = argparse.ArgumentParser(add_help=False)
    refiner.add_argument(
        "--epsilon", type=float, default=None,
        help="balance slack in time units (default: 0.05 * ideal share)",
    )
    refiner.add_argument("--max-passes", type=int, default=20)
    refiner.add_argument("--gain-variant", choices=GAIN_VARIANTS, default=INCOMING_ONLY)
    refiner.add_argument("--no-balance-moves", action="store_true")

    simflags = argparse.ArgumentParser(add_help=False)
    simflags.add_argument("--theta", type=float, default=0.95)
    simflags.add_argument("--gamma", type=float, default=0.50)
    simflags.add_argument("--window", type=float, default=10.0)
    simflags.add_argument("--cooldown", type=int, default=2)
    simflags.add_argument("--horizon", type=float, default=100.0)
    simflags.add_argument("--steps-per-iteration", type=int, default=1)
    simflags.add_argument("--sim-seed", type=int, default=0)
    simflags.add_argument("--tags", help="tags JSON file overriding auto-tagging")
    simflags.add_argument(
        "--no-auto-tags", action="store_true",
        help="fail instead of tagging untagged relocatable nodes automatically",
    )

    sub.add_parser("partition", parents=[common, strategy], help="initial placement")
    ref = sub.add_parser("refine", parents=[common, select, refiner], help="iterative repartitioning")
    ref.add_argument("--assignment", required=True, help="assignment JSON to refine")
    ref.add_argument("--dot", action="store_true", help="also write graph.dot")
    simp = sub.add_parser("simulate", parents=[common, select, simflags], help="scheduling-assistant simulation")
    simp.add_argument("--assignment", required=True, help="assignment JSON to simulate")
    sub.add_parser(
        "pipeline",
        parents=[common, strategy, select, refiner, simflags],
        help="partition, refine, simulate in one run",
    )
    return parser


def _load_inputs(args):
    graph = validate_graph(io.load_graph(args.graph))
    if args.profile:
        graph = validate_graph(io.load_profile_into(graph, args.profile))
    fleet = io.load_fleet(args.fleet)
    return cost_graph(graph, fleet), fleet


def _relocatable(args, costed, fleet):
    reference = args.reference_device or fleet.devices[0].id
    return select_relocatable(costed, reference, args.expensive_fraction)


def _resolve_tags(args, costed, fleet):
    tags = tag_nodes(costed, fleet) if not args.no_auto_tags else {}
    if args.tags:
        tags.update(io.load_tags(args.tags, costed.graph))
    return tags


def _epsilon(args, assignment: Assignment, fleet) -> float:
    if args.epsilon is not None:
        return args.epsilon
    return DEFAULT_EPSILON_FRACTION * assignment.total_cost / len(fleet)


def _partition(args, costed, fleet) -> Assignment:
    if args.strategy == "block":
        return block_partition(costed, fleet)
    return random_partition(costed, fleet, args.seed)


def _refine(args, costed, fleet, assignment):
    config = RefinerConfig(
        epsilon=_epsilon(args, assignment, fleet),
        max_passes=args.max_passes,
        enable_balance_moves=not args.no_balance_moves,
        gain_variant=args.gain_variant,
    )
    relocatable = _relocatable(args, costed, fleet)
    return refine(assignment, costed, fleet, config, relocatable)


def _simulate(args, costed, fleet, assignment):
    config = SimConfig(
        theta=args.theta,
        gamma=args.gamma,
        window=args.window,
        cooldown=args.cooldown,
        horizon=args.horizon,
        steps_per_iteration=args.steps_per_iteration,
    )
    relocatable = _relocatable(args, costed, fleet)
    tags = _resolve_tags(args, costed, fleet)
    return simulate(costed, tags, assignment, fleet, config, relocatable, seed=args.sim_seed)


def _out(args, name: str) -> str:
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, name)


def _write_dot(path: str, costed, assignment) -> None:
    device_ids = costed.fleet.ids()
    color = {d: _DOT_COLORS[i % len(_DOT_COLORS)] for i, d in enumerate(device_ids)}
    lines = ["digraph dataflow {"]
    for node in costed.graph.nodes:
        dev = assignment.placement[node.id]
        lines.append(
            f'  "{node.id}" [style=filled, fillcolor={color[dev]}, '
            f'label="{node.id}\\n{dev}"];'
        )
    for edge in costed.graph.edges:
        style = ", style=dashed" if edge.kind == "control" else ""
        lines.append(f'  "{edge.src}" -> "{edge.dst}" [label="{edge.bytes}"{style}];')
    lines.append("}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_partition(args) -> int:
    costed, fleet = _load_inputs(args)
    assignment = _partition(args, costed, fleet)
    io.write_assignment(_out(args, "assignment.json"), assignment)
    report = build_report(
        costed, assignment, fleet, makespan_initial=makespan(costed, assignment, fleet)
    )
    io.write_report(_out(args, "report.json"), report)
    if args.dot:
        _write_dot(_out(args, "graph.dot"), costed, assignment)
    return 0


def cmd_refine(args) -> int:
    costed, fleet = _load_inputs(args)
    initial = io.load_assignment(args.assignment, costed)
    refined, moves = _refine(args, costed, fleet, initial)
    io.write_assignment(_out(args, "refined_assignment.json"), refined)
    io.write_moves(_out(args, "moves.jsonl"), moves)
    report = build_report(
        costed,
        refined,
        fleet,
        cut_size_initial=cut_size(costed, initial),
        makespan_initial=makespan(costed, initial, fleet),
        makespan_refined=makespan(costed, refined, fleet),
        move_count=len(moves),
    )
    io.write_report(_out(args, "report.json"), report)
    if args.dot:
        _write_dot(_out(args, "graph.dot"), costed, refined)
    return 0


def cmd_simulate(args) -> int:
    costed, fleet = _load_inputs(args)
    initial = io.load_assignment(args.assignment, costed)
    final, trace = _simulate(args, costed, fleet, initial)
    io.write_assignment(_out(args, "final_assignment.json"), final)
    io.write_trace(_out(args, "trace.jsonl"), trace)
    report = build_report(
        costed,
        final,
        fleet,
        cut_size_initial=cut_size(costed, initial),
        makespan_initial=makespan(costed, initial, fleet),
        makespan_simulated=makespan(costed, final, fleet),
        migration_count=trace.migration_count,
    )
    io.write_report(_out(args, "report.json"), report)
    return 0


def cmd_pipeline(args) -> int:
    costed, fleet = _load_inputs(args)
    initial = _partition(args, costed, fleet)
    io.write_assignment(_out(args, "assignment.json"), initial)
    refined, moves = _refine(args, costed, fleet, initial)
    io.write_assignment(_out(args, "refined_assignment.json"), refined)
    io.write_moves(_out(args, "moves.jsonl"), moves)
    final, trace = _simulate(args, costed, fleet, refined)
    io.write_assignment(_out(args, "final_assignment.json"), final)
    io.write_trace(_out(args, "trace.jsonl"), trace)
    report = build_report(
        costed,
        final,
        fleet,
        cut_size_initial=cut_size(costed, initial),
        makespan_initial=makespan(costed, initial, fleet),
        makespan_refined=makespan(costed, refined, fleet),
        makespan_simulated=makespan(costed, final, fleet),
        move_count=len(moves),
        migration_count=trace.migration_count,
    )
    io.write_report(_out(args, "report.json"), report)
    if args.dot:
        _write_dot(_out(args, "graph.dot"), costed, refined)
    return 0


_COMMANDS = {
    "partition": cmd_partition,
    "refine": cmd_refine,
    "simulate": cmd_simulate,
    "pipeline": cmd_pipeline,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (DfplaceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
