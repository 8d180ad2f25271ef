"""Named test graphs and the search for the genus-3 graph with a small theta skeleton."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement, permutations
from typing import Sequence

from .graph import MetricGraph, bouquet, complete_graph_k4, dumbbell, from_edge_list, jacobian_data, theta_graph
from .voronoi import theta_skeleton, voronoi_cell

PAIRS4 = [(a, b) for a in range(4) for b in range(a, 4)]


def _canonical(edges: Sequence[tuple[int, int]]) -> tuple:
    best = None
    for perm in permutations(range(4)):
        key = tuple(sorted(tuple(sorted((perm[a], perm[b]))) for a, b in edges))
        if best is None or key < best:
            best = key
    return best


def _connected(edges) -> bool:
    seen, todo = {0}, [0]
    while todo:
        v = todo.pop()
        for a, b in edges:
            for x, y in ((a, b), (b, a)):
                if x == v and y not in seen:
                    seen.add(y)
                    todo.append(y)
    return len(seen) == 4


def cubic_genus3_types() -> list[tuple[tuple[int, int], ...]]:
    """Connected cubic multigraphs on 4 vertices (loops count twice), up to isomorphism."""
    out = set()
    for edges in combinations_with_replacement(PAIRS4, 6):
        deg = [0] * 4
        for a, b in edges:
            deg[a] += 1
            deg[b] += 1
        if deg == [3, 3, 3, 3] and _connected(edges):
            out.add(_canonical(edges))
    return sorted(out)


def type_graph(edges: Sequence[tuple[int, int]], lengths: Sequence | None = None) -> MetricGraph:
    return from_edge_list([f"v{i}" for i in range(4)], [(f"v{a}", f"v{b}") for a, b in edges], lengths)


@dataclass
class ThetaCount:
    edges: tuple
    lengths: tuple
    counts: list[int]


def theta1_counts(edges, lengths=None) -> list[int]:
    g = type_graph(edges, lengths)
    j = jacobian_data(g)
    return theta_skeleton(voronoi_cell(j.gram), 1).counts()


def search_theta_counts(target: Sequence[int] = (4, 9), length_sets: Sequence[Sequence] | None = None) -> list[ThetaCount]:
    """All (type, lengths) whose one-dimensional theta skeleton has the target counts."""
    length_sets = length_sets or [None, ("1", "2", "1", "1", "1/2", "1"), ("1/2", "1", "2", "3", "1", "1/3")]
    hits = []
    for t in cubic_genus3_types():
        for ls in length_sets:
            c = theta1_counts(t, ls)
            if c == list(target):
                hits.append(ThetaCount(t, tuple(ls or ("1",) * 6), c))
    return hits


TWIN_EDGES = ((0, 1), (0, 1), (0, 2), (1, 3), (2, 3), (2, 3))


def twin_edge_graph(lengths: Sequence | None = None) -> MetricGraph:
    """Two doubled edges joined by two single edges; its theta skeleton has 4 vertices and 9 edges."""
    return type_graph(TWIN_EDGES, lengths)


def suite_graphs() -> dict[str, MetricGraph]:
    return {
        "bouquet2": bouquet(["1", "2"]),
        "bouquet3": bouquet(["1", "1/2", "3"]),
        "theta": theta_graph(),
        "dumbbell": dumbbell(),
        "k4": complete_graph_k4(),
        "twin": twin_edge_graph(),
    }
