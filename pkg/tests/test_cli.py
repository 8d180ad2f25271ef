from __future__ import annotations

import json

import pytest

from tropjac.catalog import twin_edge_graph
from tropjac.cli import main
from tropjac.graph import bouquet, path_tree, theta_graph


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, g in {"theta": theta_graph(), "bq3": bouquet(["1", "1", "1"]), "twin": twin_edge_graph()}.items():
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(g.to_json()))
        out[name] = str(p)
    tree = tmp_path / "tree.json"
    tree.write_text(json.dumps(path_tree(3).to_json()))
    out["tree"] = str(tree)
    out["dir"] = tmp_path
    return out


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


def test_jacobian_report(files, capsys):
    code, rep, _ = run(["jacobian", "--graph", files["theta"]], capsys)
    assert code == 0
    assert rep["result"]["gram"] == [["2", "1"], ["1", "2"]]
    for key in ("input_hash", "basepoint", "convention", "guards", "seed"):
        assert key in rep


def test_tree_exits_2(files, capsys):
    code, _, err = run(["jacobian", "--graph", files["tree"]], capsys)
    assert code == 2 and "genus 0" in err


def test_theta_counts_and_bad_dimension(files, capsys):
    code, rep, _ = run(["theta", "--graph", files["twin"], "--d", "1"], capsys)
    assert code == 0 and rep["result"]["counts"] == [4, 9]
    code, rep, _ = run(["theta", "--graph", files["bq3"], "--d", "2"], capsys)
    assert code == 0 and rep["result"]["counts"] == [1, 3, 3]
    code, _, _ = run(["theta", "--graph", files["theta"], "--d", "2"], capsys)
    assert code == 2


def test_lefschetz_and_series(files, capsys):
    code, rep, _ = run(["lefschetz", "--graph", files["bq3"], "--d", "2"], capsys)
    assert code == 0 and rep["result"]["verdict"] == "PASS"
    code, _, _ = run(["lefschetz", "--graph", files["theta"], "--d", "0"], capsys)
    assert code == 2
    code, rep, _ = run(["series", "--graph", files["theta"]], capsys)
    assert code == 0 and rep["result"]["reduced_homology_vanishes"]


def test_rank_with_divisor_file(files, capsys):
    div = files["dir"] / "d.json"
    div.write_text(json.dumps([{"vertex": "u", "coeff": 1}, {"vertex": "v", "coeff": 1}]))
    code, rep, _ = run(["rank", "--graph", files["theta"], "--divisor", str(div)], capsys)
    assert code == 0 and rep["result"]["rank"] == rep["result"]["oracle_rank"] == 1


def test_wd_and_voronoi_with_off_export(files, capsys):
    off = files["dir"] / "off"
    code, rep, _ = run(["wd", "--graph", files["theta"], "--d", "1", "--export-off", str(off)], capsys)
    assert code == 0 and rep["result"]["matches_torus_skeleton"]
    assert (off / "w1.off").read_text().startswith("OFF")
    code, rep, _ = run(["voronoi", "--graph", files["theta"]], capsys)
    assert code == 0 and rep["result"]["f_vector"] == [6, 6, 1]


def test_guard_exit_code(files, capsys):
    code, _, _ = run(["lefschetz", "--graph", files["bq3"], "--d", "1", "--max-b", "2"], capsys)
    assert code == 3


def test_missing_arguments(files, capsys):
    assert run(["theta"], capsys)[0] == 2
    assert run(["nonsense"], capsys)[0] == 2
    assert run(["lefschetz", "--graph", files["theta"]], capsys)[0] == 2


def test_suite_files(files, capsys):
    empty = files["dir"] / "empty.json"
    empty.write_text("")
    assert run(["suite", "--suite", str(empty)], capsys)[0] == 2
    small = files["dir"] / "small.json"
    small.write_text(json.dumps({"graphs": [{"name": "t", "family": "theta"}], "checks": ["voronoi", "theta"]}))
    out = files["dir"] / "r.json"
    assert run(["suite", "--suite", str(small), "--out", str(out)], capsys)[0] == 0
    assert json.loads(out.read_text())["status"] == "PASS"
    code = main(["suite", "--suite", str(small), "--out", str(out), "--inject-fault", "sign"])
    assert code == 1
    dump = files["dir"] / "r.counterexample.json"
    assert json.loads(dump.read_text())["result"]["failures"]
