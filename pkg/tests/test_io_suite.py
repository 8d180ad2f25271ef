from __future__ import annotations

import json

import pytest
from gmpy2 import mpq

from tropjac.errors import InvalidInputError
from tropjac.graph import theta_graph
from tropjac.guards import Guards, from_env
from tropjac.io import decimal_str, dumps, load_graph, off_text, read_json
from tropjac.polytope import Polytope
from tropjac.suite import SuiteSpec, parse_suite, run_suite


def test_decimal_rendering():
    assert decimal_str(mpq(1, 3)) == "0.333333333333"
    assert decimal_str(mpq(-2, 3), 4) == "-0.6667"
    assert decimal_str(mpq(5)) == "5"
    assert decimal_str(mpq(0)) == "0"


def test_off_export_of_a_square():
    sq = Polytope.from_points([(mpq(0), mpq(0)), (mpq(1), mpq(0)), (mpq(0), mpq(1)), (mpq(1), mpq(1))])
    lines = off_text([sq]).splitlines()
    assert lines[0] == "OFF" and lines[1] == "4 1 0"
    assert lines[-1].startswith("4 ")


def test_reports_are_canonical():
    assert dumps({"b": 1, "a": [1, 2]}) == '{\n  "a": [\n    1,\n    2\n  ],\n  "b": 1\n}\n'


def test_reading_inputs(tmp_path):
    p = tmp_path / "g.json"
    p.write_text(json.dumps(theta_graph().to_json()))
    assert load_graph(p) == theta_graph()
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(InvalidInputError):
        read_json(tmp_path / "bad.json")
    with pytest.raises(InvalidInputError):
        read_json(tmp_path / "missing.json")
    (tmp_path / "list.json").write_text("[]")
    with pytest.raises(InvalidInputError):
        load_graph(tmp_path / "list.json")


def test_guard_overrides():
    assert from_env(env="max_b=3, max_d=2") == Guards(max_b=3, max_d=2)
    assert from_env(env="") == Guards()
    for bad in ("nope=1", "max_b=x", "max_b=0"):
        with pytest.raises(InvalidInputError):
            from_env(env=bad)


def test_suite_parsing():
    spec = parse_suite({"graphs": [{"name": "t", "family": "theta"}, {"name": "c", "graph": theta_graph().to_json()}], "checks": ["rank"], "samples": 2})
    assert sorted(spec.graphs) == ["c", "t"] and spec.checks == ("rank",) and spec.samples == 2
    for bad in ({}, {"graphs": []}, {"graphs": [{"family": "nope"}]}, {"graphs": [{"family": "theta"}], "checks": ["x"]},
                {"graphs": [{"family": "theta"}], "samples": -1}, []):
        with pytest.raises(InvalidInputError):
            parse_suite(bad)


def test_small_suite_and_fault_injection():
    spec = SuiteSpec({"theta": theta_graph()}, ("voronoi", "theta", "lefschetz"))
    ok = run_suite(spec)
    assert ok.passed and ok.to_json()["verdict"] == "PASS"
    bad = run_suite(spec, fault="sign")
    assert not bad.passed and bad.failures
    with pytest.raises(InvalidInputError):
        run_suite(spec, fault="other")
