from __future__ import annotations

import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import graph_points, graphs, subdivide
from tropjac.errors import InvalidInputError, NoJacobianError
from tropjac.graph import (
    TorusPoint,
    abel_jacobi_point,
    bouquet,
    circle,
    complete_graph_k4,
    cycle_basis,
    genus,
    jacobian_data,
    lift_point,
    path_image,
    path_tree,
    theta_graph,
    validate_graph,
)
from tropjac.linalg import is_integral, leading_minors, scale, sub


def test_theta_graph_is_valid_with_genus_two():
    g = theta_graph()
    assert len(g.vertices) == 2 and len(g.edges) == 3
    assert genus(g) == 2


def test_single_loop_is_subdivided():
    g = circle(1)
    assert len(g.vertices) == 2 and len(g.edges) == 2
    assert all(e.length == mpq(1, 2) for e in g.edges)
    assert genus(g) == 1


def test_disconnected_graph_rejected():
    raw = {
        "vertices": ["a", "b"],
        "edges": [{"id": "x", "tail": "a", "head": "a", "length": "1"}, {"id": "y", "tail": "b", "head": "b", "length": "1"}],
    }
    with pytest.raises(InvalidInputError, match="disconnected"):
        validate_graph(raw)


@pytest.mark.parametrize(
    "raw",
    [
        {"vertices": ["a"], "edges": [{"tail": "a", "head": "a", "length": "0"}]},
        {"vertices": ["a"], "edges": [{"tail": "a", "head": "b", "length": "1"}]},
        {"vertices": ["a"], "edges": [{"tail": "a", "head": "a", "length": "0.5.1"}]},
        {"vertices": ["a", "a"], "edges": []},
        {"edges": []},
    ],
)
def test_malformed_graphs_rejected(raw):
    with pytest.raises(InvalidInputError):
        validate_graph(raw)


def test_genus_of_standard_families():
    assert genus(bouquet([1, 1, 1])) == 3
    assert genus(theta_graph()) == 2
    assert genus(path_tree(4)) == 0


def test_cycle_bases():
    assert cycle_basis(circle(1)) == [(1, 1)]
    assert cycle_basis(path_tree(3)) == []
    cyc = cycle_basis(theta_graph())
    assert cyc == [(-1, 1, 0), (-1, 0, 1)]


def test_tree_has_no_jacobian():
    with pytest.raises(NoJacobianError, match="genus 0"):
        jacobian_data(path_tree(3))


def test_gram_matrices():
    j = jacobian_data(bouquet(["1", "5/2"]))
    assert j.gram == ((1, 0), (0, mpq(5, 2)))
    # the basis {e1 - e2, e2 - e3} gives the hexagonal form with negative off-diagonal
    g = theta_graph()
    assert jacobian_data(g, [(1, -1, 0), (0, 1, -1)]).gram == ((2, -1), (-1, 2))
    # the default fundamental basis is unimodularly equivalent to it
    assert jacobian_data(g).gram == ((2, 1), (1, 2))
    k4 = jacobian_data(complete_graph_k4())
    assert [k4.gram[i][i] for i in range(3)] == [3, 3, 3]


def test_basepoint_maps_to_zero_and_circle_formula():
    g = circle(3)
    j = jacobian_data(g)
    assert abel_jacobi_point(j, g, g.vertex_point(g.basepoint)).is_zero
    for t in [mpq(1, 4), mpq(1, 2), mpq(5, 4)]:
        x = g.point("e1~a", t) if t <= mpq(3, 2) else g.point("e1~b", t - mpq(3, 2))
        assert abel_jacobi_point(j, g, x) == TorusPoint.of([t / 3])


def test_basis_cycle_adds_lattice_vector():
    g = theta_graph(["1", "2", "1/3"])
    j = jacobian_data(g)
    for k, c in enumerate(j.cycles):
        steps = [(e.id, s) for e, s in zip(g.edges, c) if s]
        img = path_image(j, g, steps)
        assert img == tuple(mpq(int(i == k)) for i in range(2))


def _random_walk(rng: random.Random, g, start: str, steps: int) -> tuple[list, str]:
    walk, v = [], start
    for _ in range(steps):
        opts = [(i, s) for i, s in g.incident[v]]
        i, s = rng.choice(opts)
        e = g.edges[i]
        walk.append((e.id, s))
        v = e.head if s == 1 else e.tail
    return walk, v


def _walk_to(rng, g, target: str) -> list:
    """Random walk from the basepoint that ends at ``target``."""
    walk, v = _random_walk(rng, g, g.basepoint, rng.randint(0, 6))
    # finish along a BFS path
    prev = {v: None}
    todo = [v]
    while todo:
        u = todo.pop(0)
        for i, s in g.incident[u]:
            e = g.edges[i]
            w = e.head if s == 1 else e.tail
            if w not in prev:
                prev[w] = (u, e.id, s)
                todo.append(w)
    tail = []
    w = target
    while prev[w] is not None:
        u, eid, s = prev[w]
        tail.append((eid, s))
        w = u
    return walk + tail[::-1]


@settings(max_examples=200, deadline=None)
@given(graphs(), st.integers(0, 2**32), st.data())
def test_abel_jacobi_path_independence(g, seed, data):
    rng = random.Random(seed)
    j = jacobian_data(g)
    x = data.draw(graph_points(g))
    if x.vertex is not None:
        ends = [(x.vertex, None)]
    else:
        e = g.edge(x.edge)
        ends = [(e.tail, (x.edge, x.offset)), (e.head, (x.edge, x.offset - e.length))]
    images = []
    for _ in range(2):
        v, end = rng.choice(ends)
        images.append(path_image(j, g, _walk_to(rng, g, v), end))
    assert is_integral(sub(images[0], images[1]))
    assert TorusPoint.of(images[0]) == abel_jacobi_point(j, g, x)


@settings(max_examples=200, deadline=None)
@given(graphs())
def test_gram_positive_definite(g):
    j = jacobian_data(g)
    assert all(m > 0 for m in leading_minors(j.gram))


@settings(max_examples=200, deadline=None)
@given(graphs(), st.data())
def test_affine_velocity_law(g, data):
    j = jacobian_data(g)
    i = data.draw(st.integers(0, len(g.edges) - 1))
    e = g.edges[i]
    s, t = sorted(data.draw(st.lists(st.integers(0, 12), min_size=2, max_size=2)))
    x, y = g.point(e.id, e.length * mpq(s, 12)), g.point(e.id, e.length * mpq(t, 12))
    moved = sub(lift_point(j, g, y), lift_point(j, g, x))
    assert is_integral(sub(moved, scale(e.length * mpq(t - s, 12), j.velocities[i])))


@settings(max_examples=100, deadline=None)
@given(graphs(), st.data())
def test_subdivision_invariance(g, data):
    j = jacobian_data(g)
    i = data.draw(st.integers(0, len(g.edges) - 1))
    e = g.edges[i]
    s = e.length * mpq(data.draw(st.integers(1, 5)), 6)
    h, where, mid = subdivide(g, e.id, s)
    induced = []
    for c in j.cycles:
        row = [0] * len(h.edges)
        for k, pos in enumerate(where):
            for p in pos:
                row[p] = c[k]
        induced.append(tuple(row))
    jh = jacobian_data(h, induced)
    assert genus(h) == genus(g)
    assert jh.gram == j.gram
    for v in g.vertices:
        assert abel_jacobi_point(jh, h, h.vertex_point(v)) == abel_jacobi_point(j, g, g.vertex_point(v))
    assert abel_jacobi_point(jh, h, h.vertex_point(mid)) == abel_jacobi_point(j, g, g.point(e.id, s))
