"""Acceptance criteria 1-8, one pass/fail line each (shown even under capture)."""
from __future__ import annotations

import random
import time
from itertools import product
from math import comb

import pytest
from gmpy2 import mpq

from strategies import random_graph, random_point
from tropjac.arrangement import refine
from tropjac.catalog import _canonical, TWIN_EDGES, search_theta_counts, suite_graphs, type_graph
from tropjac.chipfiring import oracle_effective, rank_oracle
from tropjac.cli import main
from tropjac.complex import ChainComplex
from tropjac.divisors import (
    aj_divisor,
    aj_lift,
    div_of,
    is_effective_class,
    is_equivalent,
    random_divisor,
    random_pl_function,
    rank,
)
from tropjac.graph import TorusPoint, abel_jacobi_point, bouquet, jacobian_data, path_image
from tropjac.lefschetz import lefschetz_check
from tropjac.polytope import Polytope
from tropjac.series import linear_series
from tropjac.symprod import wd_polytopes
from tropjac.voronoi import PolytopeUnion, theta_skeleton, translate_match, voronoi_cell

SUITE = suite_graphs()
TRIALS = 1000


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[acceptance {n}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return emit


@pytest.fixture(scope="module")
def lefschetz_runs():
    runs = {}
    start = time.perf_counter()
    for name, g in SUITE.items():
        b = g.genus
        if b > 3:
            continue
        for d in range(1, b):
            runs[(name, d)] = lefschetz_check(g, d)
    return runs, time.perf_counter() - start


def _checked(cc: ChainComplex) -> ChainComplex:
    cc.check()
    return cc


def test_criterion_1_bouquet_identity(report):
    rng = random.Random(101)
    start = time.perf_counter()
    bad = []
    cases = 0
    for n in (2, 3):
        for _ in range(3):
            lengths = [f"{rng.randint(1, 9)}/{rng.randint(1, 5)}" for _ in range(n)]
            g = bouquet(lengths)
            j = jacobian_data(g)
            cell = voronoi_cell(j.gram)
            cube = sorted(product((mpq(-1, 2), mpq(1, 2)), repeat=n))
            if sorted(cell.vertices) != cube or cell.f_vector() != Polytope.from_points(cube).f_vector():
                bad.append((lengths, "cell"))
            kappa = tuple(mpq(1, 2) for _ in range(n))
            for d in range(1, n):
                cases += 1
                v = translate_match(theta_skeleton(cell, d), PolytopeUnion(n, wd_polytopes(j, g, d)))
                if v != kappa:
                    bad.append((lengths, d, v))
    elapsed = time.perf_counter() - start
    report(1, not bad and elapsed < 10, f"{cases} bouquet translates equal kappa, cells are cubes, {elapsed:.2f}s (limit 10s); failures={bad}")


def test_criterion_2_theta_counts(report):
    start = time.perf_counter()
    hits = search_theta_counts()
    types = {h.edges for h in hits}
    ok = types == {_canonical(TWIN_EDGES)}
    g = type_graph(TWIN_EDGES)
    j = jacobian_data(g)
    theta1 = theta_skeleton(voronoi_cell(j.gram), 1)
    _checked(theta1.chain_complex())
    h_theta = theta1.homology()
    w1 = refine({"W": wd_polytopes(j, g, 1)}, 3)
    _checked(w1.chain_complex())
    h_w = w1.homology("W")
    ok = ok and theta1.counts() == [4, 9] and h_theta[1].free_rank == 6 and h_w[1].free_rank == 3
    elapsed = time.perf_counter() - start
    report(
        2,
        ok and elapsed < 300,
        f"unique type {sorted(types)}; theta1 counts {theta1.counts()}, rank H1(theta1)={h_theta[1].free_rank}, "
        f"rank H1(W1)={h_w[1].free_rank}, {elapsed:.2f}s (limit 300s)",
    )


def test_criterion_3_lefschetz(report, lefschetz_runs):
    runs, elapsed = lefschetz_runs
    failed = [k for k, r in runs.items() if not r.passed]
    report(3, not failed and elapsed < 900, f"{len(runs)} (graph, d) pairs, relative homology vanishes through d, H1 map onto / iso; {elapsed:.2f}s (limit 900s); failed={failed}")


def test_criterion_4_homological_shadow(report, lefschetz_runs):
    runs, _ = lefschetz_runs
    bad = []
    for (name, d), r in runs.items():
        expect = [comb(r.b, i) for i in range(d + 1)]
        got = [r.sub[i].free_rank for i in range(d + 1)]
        if got != expect or any(r.sub[i].torsion for i in range(d + 1)):
            bad.append((name, d, got))
    report(4, not bad and len(runs) > 0, f"H_i(W_d) free of rank C(b,i) for i <= d on {len(runs)} pairs; failures={bad}")


def test_criterion_5_linear_series(report):
    rng = random.Random(505)
    start = time.perf_counter()
    bad, count = [], 0
    names = sorted(SUITE)
    for k in range(24):
        name = names[k % len(names)]
        g = SUITE[name]
        D = random_divisor(g, rng, rng.randint(1, 2))
        L = linear_series(jacobian_data(g), g, D)
        count += 1
        if not L.contractible_shadow:
            bad.append((name, str(D)))
    elapsed = time.perf_counter() - start
    report(5, not bad and count >= 20 and elapsed < 300, f"{count} linear series with vanishing reduced homology, {elapsed:.2f}s (limit 300s); failures={bad}")


def test_criterion_6_oracle_equivalence(report):
    rng = random.Random(606)
    names = sorted(SUITE)
    bad, count = [], 0
    for k in range(120):
        name = names[k % len(names)]
        g = SUITE[name]
        j = jacobian_data(g)
        D = random_divisor(g, rng, rng.randint(0, 4), effective=rng.random() < 0.5)
        count += 1
        r1, r2 = rank(j, g, D), rank_oracle(g, D.as_dict())
        e1 = D.degree >= 0 and is_effective_class(j, g, aj_lift(j, g, D), D.degree)
        e2 = oracle_effective(g, D.as_dict())
        if r1 != r2 or e1 != e2:
            bad.append((name, str(D), r1, r2, e1, e2))
    report(6, not bad and count >= 100, f"{count} random divisors (degrees 0-4): rank and effectivity agree with the chip-firing oracle; failures={bad[:3]}")


def _walk_image(rng, j, g, x):
    """Image of x along a random walk from the basepoint plus a final partial edge."""
    v, steps = g.basepoint, []
    for _ in range(rng.randint(0, 6)):
        i, s = rng.choice(g.incident[v])
        e = g.edges[i]
        steps.append((e.id, s))
        v = e.head if s == 1 else e.tail
    # walk home to the target along a BFS path
    if x.vertex is not None:
        target, end = x.vertex, None
    else:
        e = g.edge(x.edge)
        if rng.random() < 0.5:
            target, end = e.tail, (x.edge, x.offset)
        else:
            target, end = e.head, (x.edge, x.offset - e.length)
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
    back, w = [], target
    while prev[w] is not None:
        u, eid, s = prev[w]
        back.append((eid, s))
        w = u
    return TorusPoint.of(path_image(j, g, steps + back[::-1], end))


def test_criterion_7_property_suites(report):
    rng = random.Random(707)
    failures = []
    # path independence of the Abel-Jacobi map
    for _ in range(TRIALS):
        g = random_graph(rng)
        j = jacobian_data(g)
        x = random_point(rng, g)
        a, b = _walk_image(rng, j, g, x), _walk_image(rng, j, g, x)
        if not (a == b == abel_jacobi_point(j, g, x)):
            failures.append(("path", g.digest()))
    # principal divisors: degree zero, and adding one preserves the class
    for _ in range(TRIALS):
        g = random_graph(rng)
        j = jacobian_data(g)
        Df = div_of(g, random_pl_function(g, rng))
        if Df.degree != 0:
            failures.append(("degree", g.digest()))
        D = random_divisor(g, rng, rng.randint(0, 3), effective=False)
        if not (is_equivalent(j, g, D, D + Df) and aj_divisor(j, g, D + Df) == aj_divisor(j, g, D)):
            failures.append(("equivalence", g.digest()))
    # torus Betti numbers from the empty arrangement
    for b in (1, 2, 3):
        tc = refine([], b)
        _checked(tc.chain_complex())
        if tc.homology().betti != tuple(comb(b, i) for i in range(b + 1)):
            failures.append(("torus", b))
    # boundary of boundary and redundant-hyperplane invariance on generated complexes
    complexes = 0
    for name, g in sorted(SUITE.items()):
        j = jacobian_data(g)
        if j.genus > 3:
            continue
        cell = voronoi_cell(j.gram)
        for d in range(j.genus):
            _checked(theta_skeleton(cell, d).chain_complex())
            complexes += 1
        for d in range(1, j.genus):
            polys = wd_polytopes(j, g, d)
            base = refine({"W": polys}, j.genus)
            plane = (tuple(mpq(rng.randint(-1, 1) or 1) for _ in range(j.genus)), mpq(rng.randint(0, 7), 8))
            extra = refine({"W": polys}, j.genus, extra_hyperplanes=[plane])
            for tc in (base, extra):
                _checked(tc.chain_complex())
                _checked(tc.chain_complex("W"))
                _checked(tc.chain_complex("W", mode="relative"))
                complexes += 3
            if (base.homology(), base.homology("W"), base.relative_homology("W")) != (
                extra.homology(),
                extra.homology("W"),
                extra.relative_homology("W"),
            ):
                failures.append(("redundant", name, d))
    report(
        7,
        not failures,
        f"{TRIALS} trials each for path independence, deg div(f) = 0, equivalence invariance; torus Betti b=1..3; "
        f"boundary-squared zero on {complexes} complexes; redundant hyperplane invariance; failures={failures[:3]}",
    )


def test_criterion_8_determinism(report, tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"run{k}.json"
        code = main(["suite", "--seed", "8", "--out", str(path)])
        outs.append((code, path.read_bytes()))
    same = outs[0][1] == outs[1][1]
    report(8, same and outs[0][0] == 0, f"two suite runs with seed 8 are byte-identical ({len(outs[0][1])} bytes), exit {outs[0][0]}")
