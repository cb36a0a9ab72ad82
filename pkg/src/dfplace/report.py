"""Placement quality report emitted by every CLI command."""

from __future__ import annotations

from dataclasses import dataclass

from .cost import CostedGraph
from .devices import DeviceFleet
from .partition import Assignment, cut_size


@dataclass
class Report:
    """Final-state metrics plus whatever before/after figures the producing
    command can attest to; fields a command cannot fill stay null."""

    per_device_loads: dict[str, float]
    cut_size: int
    imbalance: float
    cut_size_initial: int | None = None
    makespan_initial: float | None = None
    makespan_refined: float | None = None
    makespan_simulated: float | None = None
    move_count: int | None = None
    migration_count: int | None = None

    def to_json_obj(self) -> dict:
        return {
            "per_device_loads": dict(self.per_device_loads),
            "cut_size": self.cut_size,
            "imbalance": self.imbalance,
            "cut_size_initial": self.cut_size_initial,
            "makespan_initial": self.makespan_initial,
            "makespan_refined": self.makespan_refined,
            "makespan_simulated": self.makespan_simulated,
            "move_count": self.move_count,
            "migration_count": self.migration_count,
        }


def imbalance(assignment: Assignment, fleet: DeviceFleet) -> float:
    """max_i |C_i - C/k| / (C/k); zero when the graph costs nothing."""
    share = assignment.total_cost / len(fleet)
    if share == 0:
        return 0.0
    worst = max(abs(assignment.device_load[d.id] - share) for d in fleet)
    return worst / share


def build_report(costed: CostedGraph, assignment: Assignment, fleet: DeviceFleet, **extra) -> Report:
    return Report(
        per_device_loads={d.id: assignment.device_load[d.id] for d in fleet},
        cut_size=cut_size(costed, assignment),
        imbalance=imbalance(assignment, fleet),
        **extra,
    )
