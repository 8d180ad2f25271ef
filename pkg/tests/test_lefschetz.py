from __future__ import annotations

import pytest
from gmpy2 import mpq

from tropjac.arrangement import refine
from tropjac.catalog import twin_edge_graph
from tropjac.errors import GuardExceededError, InvalidInputError
from tropjac.graph import bouquet, complete_graph_k4, dumbbell, theta_graph
from tropjac.guards import Guards
from tropjac.lefschetz import induced_map, lefschetz_check, pair_complex
from tropjac.polytope import Polytope

BQ3 = bouquet(["1", "1/2", "3"])


def test_bouquet_pair_with_w1():
    tc = pair_complex(BQ3, 1)
    rel = tc.relative_homology("W")
    assert rel[0].is_zero and rel[1].is_zero
    assert not rel[2].is_zero


def test_induced_maps_for_theta_graph():
    tc = pair_complex(theta_graph(), 1)
    m0, m1 = induced_map(tc, "W", 0), induced_map(tc, "W", 1)
    assert m0.isomorphism
    assert m1.isomorphism
    (a, b), (c, d) = m1.matrix
    assert abs(a * d - b * c) == 1


def test_induced_map_of_bouquet_w2_in_degree_two():
    m = induced_map(pair_complex(BQ3, 2), "W", 2)
    assert m.surjective


def test_point_does_not_carry_torus_cycles():
    tc = refine({"p": [Polytope.from_points([(mpq(1, 3), mpq(1, 3))])]}, 2)
    m = induced_map(tc, "p", 1)
    assert m.injective and not m.surjective
    assert m.matrix == [[], []]


@pytest.mark.parametrize("d", [1, 2])
def test_bouquet3_passes(d):
    rep = lefschetz_check(BQ3, d)
    assert rep.passed and rep.shadow_ok and rep.les_ok


def test_theta_and_dumbbell_pass():
    for g in (theta_graph(), dumbbell()):
        rep = lefschetz_check(g, 1)
        assert rep.passed and rep.shadow_ok


def test_twin_edge_graph_d1():
    rep = lefschetz_check(twin_edge_graph(), 1)
    assert rep.passed
    assert rep.sub[1].free_rank == 3


def test_top_degree_pair_is_acyclic():
    rep = lefschetz_check(bouquet(["1", "2"]), 2)
    assert all(g.is_zero for g in rep.relative.groups)
    assert rep.passed


def test_report_is_serializable_and_certifies_only_homology():
    js = lefschetz_check(theta_graph(), 1).to_json()
    assert js["verdict"] == "PASS"
    assert "homology" in js["certified"]


def test_preconditions():
    with pytest.raises(InvalidInputError):
        lefschetz_check(theta_graph(), 0)
    with pytest.raises(GuardExceededError):
        lefschetz_check(complete_graph_k4(), 1, Guards(max_b_homology=2))
