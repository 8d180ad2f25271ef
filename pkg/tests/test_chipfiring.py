from __future__ import annotations

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from tropjac.chipfiring import FiniteGraph, discrete_rank, equivalent_to_effective, q_reduced, rank_oracle, unit_subdivision
from tropjac.errors import GuardExceededError
from tropjac.graph import circle, complete_graph_k4, theta_graph
from tropjac.guards import Guards


@st.composite
def finite_graphs(draw):
    n = draw(st.integers(1, 4))
    adj = [dict() for _ in range(n)]

    def link(a, b):
        adj[a][b] = adj[a].get(b, 0) + 1
        adj[b][a] = adj[b].get(a, 0) + 1

    for v in range(1, n):
        link(draw(st.integers(0, v - 1)), v)
    for _ in range(draw(st.integers(0, 3))):
        a, b = draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1))
        if a != b:
            link(a, b)
    return FiniteGraph(n, adj)


def _laplacian_apply(fg: FiniteGraph, firing: list[int]) -> list[int]:
    return [sum(m * (firing[w] - firing[v]) for w, m in fg.adj[v].items()) for v in range(fg.n)]


def _genus(fg: FiniteGraph) -> int:
    return sum(fg.degree) // 2 - fg.n + 1


def test_k4_canonical_rank():
    fg = FiniteGraph(4, [{w: 1 for w in range(4) if w != v} for v in range(4)])
    assert discrete_rank(fg, [1, 1, 1, 1]) == 2
    assert discrete_rank(fg, [0, 0, 0, 0]) == 0
    assert discrete_rank(fg, [-1, 0, 0, 0]) == -1


def test_unit_subdivision_sizes():
    g = theta_graph(["1", "1/2", "3/2"])
    fg, index = unit_subdivision(g, [])
    # common denominator 2: 2 + (2 - 1) + (1 - 1) + (3 - 1) branch and interior vertices
    assert fg.n == 2 + 1 + 0 + 2
    assert g.point("e1", mpq(1, 2)) in index
    with pytest.raises(GuardExceededError):
        unit_subdivision(g, [], Guards(oracle_vertices=3))


def test_metric_oracle_on_known_divisors():
    g = theta_graph()
    K = {g.vertex_point("u"): 1, g.vertex_point("v"): 1}
    assert rank_oracle(g, K) == 1
    c = circle(1)
    assert rank_oracle(c, {c.point("e1~a", mpq(1, 4)): 1}) == 0
    assert rank_oracle(c, {c.point("e1~a", mpq(1, 4)): 1, c.vertex_point("v"): -1}) == -1
    k4 = complete_graph_k4()
    assert rank_oracle(k4, {k4.vertex_point(v): 1 for v in k4.vertices}) == 2


@settings(max_examples=150, deadline=None)
@given(finite_graphs(), st.data())
def test_reduced_divisor_properties(fg, data):
    D = data.draw(st.lists(st.integers(-3, 3), min_size=fg.n, max_size=fg.n))
    q = data.draw(st.integers(0, fg.n - 1))
    R = q_reduced(fg, D, q)
    assert sum(R) == sum(D)
    assert all(R[v] >= 0 for v in range(fg.n) if v != q)
    # no nonempty set avoiding q can fire legally
    for mask in range(1, 2**fg.n):
        S = [v for v in range(fg.n) if mask >> v & 1]
        if q in S:
            continue
        out = {v: sum(m for w, m in fg.adj[v].items() if w not in S) for v in S}
        assert any(R[v] < out[v] for v in S)


@settings(max_examples=60, deadline=None)
@given(finite_graphs(), st.data())
def test_riemann_roch(fg, data):
    g = _genus(fg)
    D = data.draw(st.lists(st.integers(-1, 2), min_size=fg.n, max_size=fg.n))
    K = [d - 2 for d in fg.degree]
    KD = [k - d for k, d in zip(K, D)]
    assert discrete_rank(fg, D) - discrete_rank(fg, KD) == sum(D) + 1 - g


@settings(max_examples=80, deadline=None)
@given(finite_graphs(), st.data())
def test_effectivity_invariant_under_firing(fg, data):
    D = data.draw(st.lists(st.integers(-2, 2), min_size=fg.n, max_size=fg.n))
    fire = data.draw(st.lists(st.integers(-2, 2), min_size=fg.n, max_size=fg.n))
    E = [a + b for a, b in zip(D, _laplacian_apply(fg, fire))]
    assert equivalent_to_effective(fg, D) == equivalent_to_effective(fg, E)
