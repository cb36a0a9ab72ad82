import hashlib
import json
import os

from dfplace.cli import main


def write(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh)
    return str(path)


def chain_graph_obj():
    return {
        "nodes": [
            {"id": "a", "op_kind": "matmul", "op_count": 100, "bytes_touched": 0, "stateful": False},
            {"id": "b", "op_kind": "matmul", "op_count": 100, "bytes_touched": 0, "stateful": False},
            {"id": "c", "op_kind": "matmul", "op_count": 100, "bytes_touched": 0, "stateful": False},
        ],
        "edges": [
            {"src": "a", "dst": "b", "kind": "data", "bytes": 8},
            {"src": "b", "dst": "c", "kind": "data", "bytes": 8},
        ],
    }


def fleet_obj(k=2, compute=100.0):
    return {
        "devices": [
            {"id": f"d{j}", "compute_throughput": compute, "mem_bandwidth": 1e6, "net_bandwidth": 1e5}
            for j in range(k)
        ]
    }


def skewed_graph_obj():
    return {
        "nodes": [
            {"id": "h0", "op_kind": "matmul", "op_count": 5000, "bytes_touched": 0, "stateful": False},
            {"id": "h1", "op_kind": "matmul", "op_count": 5000, "bytes_touched": 0, "stateful": False},
        ],
        "edges": [],
    }


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


def sha(path):
    return hashlib.sha256(read(path)).hexdigest()


def test_partition_block_writes_contiguous_assignment(tmp_path):
    g = write(tmp_path / "g.json", chain_graph_obj())
    f = write(tmp_path / "f.json", fleet_obj())
    out = str(tmp_path / "out")
    assert main(["partition", "--graph", g, "--fleet", f, "--out-dir", out]) == 0
    asg = json.loads(read(os.path.join(out, "assignment.json")))
    assert asg == {"a": "d0", "b": "d0", "c": "d1"}
    report = json.loads(read(os.path.join(out, "report.json")))
    assert report["cut_size"] == 8
    assert report["per_device_loads"] == {"d0": 2.0, "d1": 1.0}


def test_malformed_json_exits_2_with_byte_offset(tmp_path, capsys):
    bad = tmp_path / "g.json"
    bad.write_text('{"nodes": [}')
    f = write(tmp_path / "f.json", fleet_obj())
    code = main(["partition", "--graph", str(bad), "--fleet", f, "--out-dir", str(tmp_path / "o")])
    assert code == 2
    err = capsys.readouterr().err
    assert "byte offset" in err


def test_unknown_field_exits_2_naming_entity(tmp_path, capsys):
    obj = chain_graph_obj()
    obj["nodes"][0]["surprise"] = 1
    g = write(tmp_path / "g.json", obj)
    f = write(tmp_path / "f.json", fleet_obj())
    code = main(["partition", "--graph", g, "--fleet", f, "--out-dir", str(tmp_path / "o")])
    assert code == 2
    err = capsys.readouterr().err
    assert "surprise" in err and "a" in err


def test_missing_file_exits_1(tmp_path, capsys):
    f = write(tmp_path / "f.json", fleet_obj())
    code = main(["partition", "--graph", str(tmp_path / "nope.json"), "--fleet", f])
    assert code == 1


def test_cycle_exits_2(tmp_path, capsys):
    obj = chain_graph_obj()
    obj["edges"].append({"src": "c", "dst": "a", "kind": "data", "bytes": 1})
    g = write(tmp_path / "g.json", obj)
    f = write(tmp_path / "f.json", fleet_obj())
    assert main(["partition", "--graph", g, "--fleet", f, "--out-dir", str(tmp_path / "o")]) == 2


def test_random_strategy_is_reproducible(tmp_path):
    g = write(tmp_path / "g.json", chain_graph_obj())
    f = write(tmp_path / "f.json", fleet_obj())
    outs = []
    for name in ("o1", "o2"):
        out = str(tmp_path / name)
        assert main([
            "partition", "--graph", g, "--fleet", f, "--out-dir", out,
            "--strategy", "random", "--seed", "7",
        ]) == 0
        outs.append(out)
    assert sha(os.path.join(outs[0], "assignment.json")) == sha(os.path.join(outs[1], "assignment.json"))
    assert sha(os.path.join(outs[0], "report.json")) == sha(os.path.join(outs[1], "report.json"))


def test_refine_colocates_and_reports_zero_cut(tmp_path):
    g = write(tmp_path / "g.json", {
        "nodes": [
            {"id": "a", "op_kind": "matmul", "op_count": 100, "bytes_touched": 0, "stateful": False},
            {"id": "b", "op_kind": "matmul", "op_count": 100, "bytes_touched": 0, "stateful": False},
        ],
        "edges": [{"src": "a", "dst": "b", "kind": "data", "bytes": 8}],
    })
    f = write(tmp_path / "f.json", fleet_obj())
    asg = write(tmp_path / "a.json", {"a": "d0", "b": "d1"})
    out = str(tmp_path / "out")
    assert main([
        "refine", "--graph", g, "--fleet", f, "--assignment", asg,
        "--out-dir", out, "--epsilon", "1.0", "--expensive-fraction", "1.0",
    ]) == 0
    report = json.loads(read(os.path.join(out, "report.json")))
    assert report["cut_size_initial"] == 8
    assert report["cut_size"] == 0
    assert report["move_count"] == 1
    moves = read(os.path.join(out, "moves.jsonl")).decode().strip().splitlines()
    assert len(moves) == 1
    rec = json.loads(moves[0])
    assert rec["kind"] == "communication" and rec["from"] != rec["to"]


def test_refine_epsilon_zero_blocks_all_communication_moves(tmp_path):
    # Three unit-cost nodes on two devices: C = 3 so C/k = 1.5 can never be
    # met exactly; with epsilon 0 both guards are unsatisfiable from a 2|1
    # split, so no communication (or balance) move fires despite the cut.
    g = write(tmp_path / "g.json", chain_graph_obj())
    f = write(tmp_path / "f.json", fleet_obj())
    asg = write(tmp_path / "a.json", {"a": "d0", "b": "d0", "c": "d1"})
    out = str(tmp_path / "out")
    assert main([
        "refine", "--graph", g, "--fleet", f, "--assignment", asg,
        "--out-dir", out, "--epsilon", "0", "--expensive-fraction", "1.0",
    ]) == 0
    assert read(os.path.join(out, "moves.jsonl")) == b""
    report = json.loads(read(os.path.join(out, "report.json")))
    assert report["move_count"] == 0
    refined = json.loads(read(os.path.join(out, "refined_assignment.json")))
    assert refined == {"a": "d0", "b": "d0", "c": "d1"}


def test_refine_locally_optimal_input_unchanged(tmp_path):
    g = write(tmp_path / "g.json", chain_graph_obj())
    f = write(tmp_path / "f.json", fleet_obj())
    asg = write(tmp_path / "a.json", {"a": "d0", "b": "d0", "c": "d1"})
    out1 = str(tmp_path / "o1")
    assert main([
        "refine", "--graph", g, "--fleet", f, "--assignment", asg,
        "--out-dir", out1, "--epsilon", "1.0", "--expensive-fraction", "1.0",
    ]) == 0
    # feed the refined assignment back in: zero moves
    out2 = str(tmp_path / "o2")
    assert main([
        "refine", "--graph", g, "--fleet", f,
        "--assignment", os.path.join(out1, "refined_assignment.json"),
        "--out-dir", out2, "--epsilon", "1.0", "--expensive-fraction", "1.0",
    ]) == 0
    assert json.loads(read(os.path.join(out2, "report.json")))["move_count"] == 0
    assert read(os.path.join(out1, "refined_assignment.json")) == read(
        os.path.join(out2, "refined_assignment.json")
    )


def test_assignment_roundtrip_with_integer_node_ids(tmp_path):
    g = write(tmp_path / "g.json", {
        "nodes": [
            {"id": 1, "op_kind": "matmul", "op_count": 100, "bytes_touched": 0, "stateful": False},
            {"id": 2, "op_kind": "matmul", "op_count": 100, "bytes_touched": 0, "stateful": False},
        ],
        "edges": [{"src": 1, "dst": 2, "kind": "data", "bytes": 4}],
    })
    f = write(tmp_path / "f.json", fleet_obj())
    out = str(tmp_path / "out")
    assert main(["partition", "--graph", g, "--fleet", f, "--out-dir", out]) == 0
    out2 = str(tmp_path / "out2")
    assert main([
        "refine", "--graph", g, "--fleet", f,
        "--assignment", os.path.join(out, "assignment.json"), "--out-dir", out2,
    ]) == 0


def test_simulate_skewed_scenario(tmp_path):
    g = write(tmp_path / "g.json", skewed_graph_obj())
    f = write(tmp_path / "f.json", fleet_obj(compute=1000.0))
    asg = write(tmp_path / "a.json", {"h0": "d0", "h1": "d0"})
    out1, out2 = str(tmp_path / "o1"), str(tmp_path / "o2")
    for out in (out1, out2):
        assert main([
            "simulate", "--graph", g, "--fleet", f, "--assignment", asg,
            "--out-dir", out, "--expensive-fraction", "1.0",
        ]) == 0
    report = json.loads(read(os.path.join(out1, "report.json")))
    assert report["migration_count"] == 1
    assert report["makespan_simulated"] <= report["makespan_initial"]
    final = json.loads(read(os.path.join(out1, "final_assignment.json")))
    assert sorted(final.values()) == ["d0", "d1"]
    # byte-identical outputs across reruns
    assert sha(os.path.join(out1, "trace.jsonl")) == sha(os.path.join(out2, "trace.jsonl"))
    assert sha(os.path.join(out1, "final_assignment.json")) == sha(
        os.path.join(out2, "final_assignment.json")
    )


def test_simulate_single_device_reports_zero_migrations(tmp_path):
    g = write(tmp_path / "g.json", skewed_graph_obj())
    f = write(tmp_path / "f.json", fleet_obj(k=1, compute=1000.0))
    asg = write(tmp_path / "a.json", {"h0": "d0", "h1": "d0"})
    out = str(tmp_path / "out")
    assert main([
        "simulate", "--graph", g, "--fleet", f, "--assignment", asg, "--out-dir", out,
    ]) == 0
    assert json.loads(read(os.path.join(out, "report.json")))["migration_count"] == 0


def test_simulate_no_auto_tags_requires_tags_file(tmp_path, capsys):
    g = write(tmp_path / "g.json", skewed_graph_obj())
    f = write(tmp_path / "f.json", fleet_obj(compute=1000.0))
    asg = write(tmp_path / "a.json", {"h0": "d0", "h1": "d0"})
    code = main([
        "simulate", "--graph", g, "--fleet", f, "--assignment", asg,
        "--out-dir", str(tmp_path / "o"), "--no-auto-tags", "--expensive-fraction", "1.0",
    ])
    assert code == 2
    assert "tag" in capsys.readouterr().err


def test_simulate_tags_file_overrides(tmp_path):
    g = write(tmp_path / "g.json", skewed_graph_obj())
    f = write(tmp_path / "f.json", fleet_obj(compute=1000.0))
    asg = write(tmp_path / "a.json", {"h0": "d0", "h1": "d0"})
    tags = write(tmp_path / "t.json", {"h0": "memory_bound", "h1": "memory_bound"})
    out = str(tmp_path / "out")
    assert main([
        "simulate", "--graph", g, "--fleet", f, "--assignment", asg,
        "--out-dir", out, "--tags", tags, "--expensive-fraction", "1.0",
    ]) == 0
    # compute-overloaded device has no compute-bound nodes now: no migration
    assert json.loads(read(os.path.join(out, "report.json")))["migration_count"] == 0


def test_profile_overrides_costs(tmp_path):
    g = write(tmp_path / "g.json", chain_graph_obj())
    f = write(tmp_path / "f.json", fleet_obj())
    prof = write(tmp_path / "p.json", {"measured_costs_us": {"a": 10.0}})
    out = str(tmp_path / "out")
    assert main([
        "partition", "--graph", g, "--fleet", f, "--out-dir", out, "--profile", prof,
    ]) == 0
    report = json.loads(read(os.path.join(out, "report.json")))
    # a alone (cost 10) exceeds the target (12/2 = 6): it fills d0
    assert report["per_device_loads"] == {"d0": 10.0, "d1": 2.0}


def test_profile_unknown_node_exits_2(tmp_path):
    g = write(tmp_path / "g.json", chain_graph_obj())
    f = write(tmp_path / "f.json", fleet_obj())
    prof = write(tmp_path / "p.json", {"measured_costs_us": {"ghost": 1.0}})
    assert main([
        "partition", "--graph", g, "--fleet", f, "--out-dir", str(tmp_path / "o"),
        "--profile", prof,
    ]) == 2


def test_pipeline_writes_all_artifacts(tmp_path):
    g = write(tmp_path / "g.json", chain_graph_obj())
    f = write(tmp_path / "f.json", fleet_obj())
    out = str(tmp_path / "out")
    assert main([
        "pipeline", "--graph", g, "--fleet", f, "--out-dir", out,
        "--expensive-fraction", "1.0", "--dot",
    ]) == 0
    for name in (
        "assignment.json",
        "refined_assignment.json",
        "moves.jsonl",
        "final_assignment.json",
        "trace.jsonl",
        "report.json",
        "graph.dot",
    ):
        assert os.path.exists(os.path.join(out, name)), name
    report = json.loads(read(os.path.join(out, "report.json")))
    assert report["move_count"] is not None and report["migration_count"] is not None
    dot = read(os.path.join(out, "graph.dot")).decode()
    assert dot.startswith("digraph") and '"a" -> "b"' in dot


def test_pipeline_block_vs_random_both_valid(tmp_path):
    g = write(tmp_path / "g.json", chain_graph_obj())
    f = write(tmp_path / "f.json", fleet_obj())
    for strategy in ("block", "random"):
        out = str(tmp_path / strategy)
        assert main([
            "pipeline", "--graph", g, "--fleet", f, "--out-dir", out,
            "--strategy", strategy, "--seed", "3",
        ]) == 0
        report = json.loads(read(os.path.join(out, "report.json")))
        assert report["cut_size"] >= 0 and report["imbalance"] >= 0


def test_report_matches_independent_recomputation(tmp_path):
    # Cross-check: rebuild loads, cut, and imbalance from the written
    # assignment file and the raw inputs, without the library's caches.
    g_obj = chain_graph_obj()
    f_obj = fleet_obj()
    g = write(tmp_path / "g.json", g_obj)
    f = write(tmp_path / "f.json", f_obj)
    out = str(tmp_path / "out")
    assert main([
        "pipeline", "--graph", g, "--fleet", f, "--out-dir", out,
        "--expensive-fraction", "1.0",
    ]) == 0
    final = json.loads(read(os.path.join(out, "final_assignment.json")))
    report = json.loads(read(os.path.join(out, "report.json")))

    rates = {d["id"]: d["compute_throughput"] for d in f_obj["devices"]}
    loads = {d["id"]: 0.0 for d in f_obj["devices"]}
    for n in g_obj["nodes"]:
        dev = final[n["id"]]
        loads[dev] += n["op_count"] / rates[dev]
    assert report["per_device_loads"] == loads

    cut = sum(
        e["bytes"] for e in g_obj["edges"] if final[e["src"]] != final[e["dst"]]
    )
    assert report["cut_size"] == cut

    share = sum(loads.values()) / len(loads)
    worst = max(abs(v - share) for v in loads.values())
    assert report["imbalance"] == worst / share


def test_empty_graph_pipeline(tmp_path):
    g = write(tmp_path / "g.json", {"nodes": [], "edges": []})
    f = write(tmp_path / "f.json", fleet_obj())
    out = str(tmp_path / "out")
    assert main(["pipeline", "--graph", g, "--fleet", f, "--out-dir", out]) == 0
    report = json.loads(read(os.path.join(out, "report.json")))
    assert report["cut_size"] == 0 and report["imbalance"] == 0.0


def test_pipeline_deterministic_outputs(tmp_path):
    g = write(tmp_path / "g.json", chain_graph_obj())
    f = write(tmp_path / "f.json", fleet_obj())
    hashes = []
    for name in ("r1", "r2"):
        out = str(tmp_path / name)
        assert main([
            "pipeline", "--graph", g, "--fleet", f, "--out-dir", out,
            "--strategy", "random", "--seed", "11",
        ]) == 0
        hashes.append([
            sha(os.path.join(out, n))
            for n in ("assignment.json", "refined_assignment.json", "moves.jsonl",
                      "final_assignment.json", "trace.jsonl", "report.json")
        ])
    assert hashes[0] == hashes[1]
