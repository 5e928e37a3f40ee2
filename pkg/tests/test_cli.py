"""End-to-end command line behavior and exit codes."""

import json

import pytest

from redforge.cli import main


def write_graph(tmp_path, obj, name="graph.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


P3 = {"n": 3, "edges": [[1, 2], [2, 3]]}
K4 = {"n": 4, "edges": [[1, 2], [1, 3], [1, 4], [2, 3], [2, 4], [3, 4]]}


def read_report(path):
    return json.loads(path.read_text())


def test_tree_p3(tmp_path, capsys):
    gpath = write_graph(tmp_path, P3)
    out = tmp_path / "report.json"
    code = main(["tree", gpath, "--out", str(out)])
    assert code == 0
    report = read_report(out)
    assert report["census"] == {"1": 1, "2": 2}
    assert report["full_dimensional_leaves"] == 2
    assert report["tree"]["root"]["step"] == {"i": 1, "j": 2, "k": 3, "ci": 0, "cj": 0}


def test_tree_alternating_single_node(tmp_path):
    gpath = write_graph(tmp_path, {"n": 3, "edges": [[1, 3]]})
    out = tmp_path / "r.json"
    assert main(["tree", gpath, "--out", str(out)]) == 0
    report = read_report(out)
    assert report["census"] == {"1": 1}
    assert "children" not in report["tree"]["root"]


def test_tree_k4_census(tmp_path):
    gpath = write_graph(tmp_path, K4)
    out = tmp_path / "r.json"
    assert main(["tree", gpath, "--out", str(out)]) == 0
    assert read_report(out)["full_dimensional_leaves"] == 10


def test_tree_bad_input(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["tree", str(bad)]) == 2
    gpath = write_graph(tmp_path, {"edges": [[1, 2]]})
    assert main(["tree", gpath]) == 2


def test_tree_budget_exit(tmp_path):
    gpath = write_graph(tmp_path, K4)
    assert main(["tree", gpath, "--budget", "5"]) == 3


def test_verify_p3_all_checks(tmp_path):
    gpath = write_graph(tmp_path, P3)
    out = tmp_path / "r.json"
    code = main(["verify", gpath, "--out", str(out)])
    assert code == 0
    report = read_report(out)
    verdicts = {v["check"]: v["verdict"] for v in report["verdicts"]}
    assert set(verdicts) == {
        "triangulation",
        "shelling",
        "leafsum",
        "embeddability",
        "qh",
        "qht",
        "theorem7",
        "cvector",
    }
    assert all(v == "pass" for v in verdicts.values())


def test_verify_sweep_file(tmp_path):
    graphs = [P3, {"n": 4, "edges": [[1, 2], [2, 3], [3, 4]]}]
    gpath = write_graph(tmp_path, graphs)
    code = main(["verify", gpath, "--checks", "triangulation,shelling,leafsum"])
    assert code == 0


def test_search_then_verify_theorem7_scope(tmp_path):
    gpath = write_graph(tmp_path, K4)
    out = tmp_path / "search.json"
    code = main(["search-c7", "--graph", gpath, "--space", "all", "--out", str(out)])
    assert code == 0
    report = read_report(out)
    assert report["found"]
    steps = tmp_path / "steps.json"
    steps.write_text(json.dumps(report["witness_steps"]))
    # replaying the discovered tree: theorem7 must refuse (not extra strong)
    vout = tmp_path / "verify.json"
    code = main(
        [
            "verify",
            gpath,
            "--order",
            "file",
            "--order-file",
            str(steps),
            "--checks",
            "theorem7",
            "--out",
            str(vout),
        ]
    )
    assert code == 1
    verdicts = read_report(vout)["verdicts"]
    assert verdicts[0]["verdict"] == "scope-error"
    # with --allow-scope the refusal is tolerated
    code = main(
        [
            "verify",
            gpath,
            "--order",
            "file",
            "--order-file",
            str(steps),
            "--checks",
            "theorem7",
            "--allow-scope",
        ]
    )
    assert code == 0


def test_search_replay_round_trip(tmp_path):
    gpath = write_graph(tmp_path, K4)
    out1 = tmp_path / "s1.json"
    out2 = tmp_path / "s2.json"
    assert main(["search-c7", "--graph", gpath, "--out", str(out1)]) == 0
    assert main(["search-c7", "--graph", gpath, "--out", str(out2)]) == 0
    r1, r2 = read_report(out1), read_report(out2)
    r1.pop("timing_seconds")
    r2.pop("timing_seconds")
    assert r1 == r2


def test_search_inconclusive_budget(tmp_path):
    gpath = write_graph(tmp_path, K4)
    assert main(["search-c7", "--graph", gpath, "--budget", "3"]) == 4


def test_search_default_k4():
    assert main(["search-c7", "--format", "text"]) == 0


def test_experiment_wb_balance(tmp_path):
    # the experiment reports, it does not assume: under the literal facet
    # weights the expansion weight of deep leaves can differ from the
    # balance (first at n=4, where the one-edge leaf gets b1*b2 vs b1^2)
    out = tmp_path / "exp.json"
    assert main(["experiment", "wb-balance", "--n", "3", "--out", str(out)]) == 0
    assert read_report(out)["all_match"] is True
    assert main(["experiment", "wb-balance", "--n", "4", "--out", str(out)]) == 0
    report = read_report(out)
    assert report["all_match"] is False
    mismatches = [r for r in report["leaves"] if not r["match"]]
    assert [r["graph"] for r in mismatches] == [[[1, 4]]]
    assert mismatches[0]["weight"] == "b1*b2"
    assert mismatches[0]["balance_sum"] == "b1^2"
