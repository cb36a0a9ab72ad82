import random

import pytest

from dfplace import (
    ControlEdgeWithBytes,
    CycleDetected,
    DanglingEdge,
    DataflowGraph,
    DuplicateNode,
    Edge,
    NegativeWeight,
    OperatorNode,
    StatelessVariable,
    topological_sort,
    validate_graph,
)
from conftest import node, random_graph


def test_empty_graph_is_valid():
    g = DataflowGraph()
    assert validate_graph(g) is g
    assert topological_sort(g) == []


def test_smallest_dag_is_valid():
    g = DataflowGraph(
        nodes=[node("a"), node("b")],
        edges=[Edge("a", "b", "data", 4)],
    )
    validated = validate_graph(g)
    assert len(validated.nodes) == 2 and len(validated.edges) == 1


def test_two_cycle_detected():
    g = DataflowGraph(
        nodes=[node("a"), node("b")],
        edges=[Edge("a", "b", "data", 1), Edge("b", "a", "data", 1)],
    )
    with pytest.raises(CycleDetected) as exc:
        validate_graph(g)
    assert set(exc.value.cycle) == {"a", "b"}


def test_self_loop_is_a_cycle():
    g = DataflowGraph(nodes=[node("a")], edges=[Edge("a", "a", "data", 1)])
    with pytest.raises(CycleDetected) as exc:
        validate_graph(g)
    assert exc.value.cycle == ["a"]


def test_witness_cycle_is_a_real_cycle():
    # Cycle plus a tail hanging off it; the witness must be the cycle only.
    g = DataflowGraph(
        nodes=[node(n) for n in "abcd"],
        edges=[
            Edge("a", "b", "data", 1),
            Edge("b", "c", "data", 1),
            Edge("c", "a", "data", 1),
            Edge("c", "d", "data", 1),
        ],
    )
    with pytest.raises(CycleDetected) as exc:
        validate_graph(g)
    cycle = exc.value.cycle
    assert set(cycle) == {"a", "b", "c"}
    for src, dst in zip(cycle, cycle[1:] + cycle[:1]):
        assert any(e.src == src and e.dst == dst for e in g.edges)


def test_dangling_edge():
    g = DataflowGraph(nodes=[node("a")], edges=[Edge("a", "ghost", "data", 1)])
    with pytest.raises(DanglingEdge):
        validate_graph(g)


def test_duplicate_node():
    g = DataflowGraph(nodes=[node("a"), node("a")], edges=[])
    with pytest.raises(DuplicateNode):
        validate_graph(g)


def test_negative_counts_rejected():
    with pytest.raises(NegativeWeight):
        validate_graph(DataflowGraph(nodes=[node("a", ops=-1)], edges=[]))
    with pytest.raises(NegativeWeight):
        validate_graph(
            DataflowGraph(
                nodes=[node("a"), node("b")],
                edges=[Edge("a", "b", "data", -5)],
            )
        )


def test_control_edge_with_bytes_rejected():
    g = DataflowGraph(
        nodes=[node("a"), node("b")],
        edges=[Edge("a", "b", "control", 3)],
    )
    with pytest.raises(ControlEdgeWithBytes):
        validate_graph(g)


def test_variable_must_be_stateful():
    g = DataflowGraph(
        nodes=[OperatorNode(id="w", op_kind="variable", stateful=False)], edges=[]
    )
    with pytest.raises(StatelessVariable):
        validate_graph(g)


def test_topo_chain():
    g = DataflowGraph(
        nodes=[node("a"), node("b"), node("c")],
        edges=[Edge("a", "b"), Edge("b", "c")],
    )
    assert topological_sort(g) == ["a", "b", "c"]


def test_topo_diamond_breaks_ties_by_id():
    g = DataflowGraph(
        nodes=[node(n) for n in "dcba"],
        edges=[Edge("a", "b"), Edge("a", "c"), Edge("b", "d"), Edge("c", "d")],
    )
    assert topological_sort(g) == ["a", "b", "c", "d"]


def test_topo_isolated_nodes_sorted_by_id():
    g = DataflowGraph(nodes=[node("c"), node("a"), node("b")], edges=[])
    assert topological_sort(g) == ["a", "b", "c"]


def test_topo_mixed_id_types_int_before_str():
    g = DataflowGraph(nodes=[node("a"), node(2), node(1)], edges=[])
    assert topological_sort(g) == [1, 2, "a"]


def test_topo_respects_edges_on_random_graphs():
    for seed in range(30):
        g = random_graph(random.Random(seed))
        order = topological_sort(g)
        assert sorted(order) == sorted(g.node_ids())
        position = {nid: i for i, nid in enumerate(order)}
        for e in g.edges:
            assert position[e.src] < position[e.dst]


def test_validate_idempotent_and_sort_deterministic():
    g = random_graph(random.Random(7))
    assert validate_graph(g) is validate_graph(g)
    assert topological_sort(g) == topological_sort(g)
