"""Independent rank oracle: discrete Baker-Norine rank on a unit subdivision.

Scaling all lengths by the common denominator N of lengths and divisor
offsets and subdividing into unit segments gives a finite multigraph whose
divisor rank equals the metric rank of any divisor supported on its vertices.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import lcm
from typing import Mapping

from gmpy2 import mpq

from .errors import GuardExceededError, InvalidInputError
from .graph import GraphPoint, MetricGraph
from .guards import DEFAULT, Guards


@dataclass
class FiniteGraph:
    n: int
    adj: list[dict[int, int]]  # neighbour -> edge multiplicity

    @property
    def degree(self) -> list[int]:
        return [sum(a.values()) for a in self.adj]


def unit_subdivision(g: MetricGraph, points, guards: Guards = DEFAULT) -> tuple[FiniteGraph, dict]:
    """The subdivided graph and a map from GraphPoint to vertex index."""
    den = 1
    for e in g.edges:
        den = lcm(den, e.length.denominator)
    for p in points:
        den = lcm(den, p.offset.denominator)
    index: dict = {}
    for v in g.vertices:
        index[g.vertex_point(v)] = len(index)
    total = len(index) + sum(int(e.length * den) - 1 for e in g.edges)
    if total > guards.oracle_vertices:
        raise GuardExceededError(f"oracle graph would have {total} vertices (guard {guards.oracle_vertices})")
    adj: list[dict[int, int]] = [dict() for _ in range(total)]
    nxt = len(g.vertices)
    for e in g.edges:
        steps = int(e.length * den)
        chain = [index[g.vertex_point(e.tail)]]
        for k in range(1, steps):
            chain.append(nxt)
            index[GraphPoint(None, e.id, mpq(k, den))] = nxt
            nxt += 1
        chain.append(index[g.vertex_point(e.head)])
        for a, b in zip(chain, chain[1:]):
            adj[a][b] = adj[a].get(b, 0) + 1
            adj[b][a] = adj[b].get(a, 0) + 1
    return FiniteGraph(total, adj), index


def _layers(fg: FiniteGraph, q: int) -> list[int]:
    dist = [-1] * fg.n
    dist[q] = 0
    todo = deque([q])
    while todo:
        v = todo.popleft()
        for w in fg.adj[v]:
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                todo.append(w)
    return dist


def _nonnegative_off(fg: FiniteGraph, D: list[int], q: int, dist: list[int]) -> list[int]:
    """Equivalent divisor that is >= 0 away from q.

    Borrowing by the set {dist >= L} raises every vertex at distance L by its
    number of edges towards layer L-1 and lowers layer L-1; sweeping L from
    the outermost layer inwards pushes all debt onto q.
    """
    D = list(D)
    for L in range(max(dist), 0, -1):
        layer = [v for v in range(fg.n) if dist[v] == L]
        need = 0
        for v in layer:
            if D[v] < 0:
                down = sum(m for w, m in fg.adj[v].items() if dist[w] == L - 1)
                need = max(need, -(D[v] // down))  # ceil(-D[v] / down)
        if need:
            for v in range(fg.n):
                if dist[v] >= L:
                    for w, m in fg.adj[v].items():
                        if dist[w] < L:
                            D[v] += need * m
                            D[w] -= need * m
    return D


def q_reduced(fg: FiniteGraph, D: list[int], q: int) -> list[int]:
    """The q-reduced divisor equivalent to D (Dhar's burning algorithm)."""
    D = _nonnegative_off(fg, D, q, _layers(fg, q))
    while True:
        burnt = {q}
        todo = [q]
        fire_count = [0] * fg.n
        while todo:
            v = todo.pop()
            for w, m in fg.adj[v].items():
                if w in burnt:
                    continue
                fire_count[w] += m
                if fire_count[w] > D[w]:
                    burnt.add(w)
                    todo.append(w)
        if len(burnt) == fg.n:
            return D
        unburnt = [v for v in range(fg.n) if v not in burnt]
        # fire the unburnt set as often as stays legal
        k = min(D[v] // fire_count[v] for v in unburnt if fire_count[v])
        for v in unburnt:
            for w, m in fg.adj[v].items():
                if w in burnt:
                    D[v] -= k * m
                    D[w] += k * m


def equivalent_to_effective(fg: FiniteGraph, D: list[int], q: int = 0) -> bool:
    return q_reduced(fg, D, q)[q] >= 0


def discrete_rank(fg: FiniteGraph, D: list[int]) -> int:
    deg = sum(D)
    if deg < 0 or not equivalent_to_effective(fg, D):
        return -1
    r = 0
    while r < deg:
        k = r + 1
        for E in combinations_with_replacement(range(fg.n), k):
            Dk = list(D)
            for v in E:
                Dk[v] -= 1
            if not equivalent_to_effective(fg, Dk):
                return r
        r = k
    return r


def rank_oracle(g: MetricGraph, D: Mapping[GraphPoint, int], guards: Guards = DEFAULT) -> int:
    """Baker-Norine rank of D computed on the unit subdivision."""
    if sum(D.values()) < 0:
        return -1
    fg, index = unit_subdivision(g, D.keys(), guards)
    vec = [0] * fg.n
    for p, c in D.items():
        if p not in index:
            raise InvalidInputError(f"point {p} is not on the subdivision")
        vec[index[p]] += c
    return discrete_rank(fg, vec)


def oracle_effective(g: MetricGraph, D: Mapping[GraphPoint, int], guards: Guards = DEFAULT) -> bool:
    if sum(D.values()) < 0:
        return False
    fg, index = unit_subdivision(g, D.keys(), guards)
    vec = [0] * fg.n
    for p, c in D.items():
        vec[index[p]] += c
    return equivalent_to_effective(fg, vec)
