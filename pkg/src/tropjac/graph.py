"""Metric graphs, their cycle lattice and the tropical Abel-Jacobi map.

Coordinates on H_1(G, R) come from the fundamental cycles of a fixed spanning
tree, so the period lattice is exactly Z^b and the quadratic form
``Q(sum a_e e) = sum a_e^2 len(e)`` becomes ``x^T G x`` for the Gram matrix G.
"""
from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Mapping, Sequence

from gmpy2 import mpq

from .errors import InvalidInputError, NoJacobianError
from .linalg import ZERO, Q, add, dot, frac_vec, inverse, leading_minors, matvec, qstr, scale, zeros

CONVENTION = "fundamental-cycles/greedy-spanning-tree/edge-index-order"


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    length: mpq


@dataclass(frozen=True)
class MetricGraph:
    """Loopless working model of a metric graph.

    ``loops`` remembers how each input loop was subdivided:
    ``{loop_id: (first_half, second_half, midpoint_vertex)}``.
    """

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    basepoint: str
    loops: tuple[tuple[str, tuple[str, str, str]], ...] = ()

    @cached_property
    def edge_index(self) -> dict[str, int]:
        return {e.id: i for i, e in enumerate(self.edges)}

    @cached_property
    def vertex_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def edge(self, eid: str) -> Edge:
        return self.edges[self.edge_index[eid]]

    @cached_property
    def incident(self) -> dict[str, list[tuple[int, int]]]:
        """vertex -> [(edge index, +1 if the vertex is the tail else -1)]."""
        inc: dict[str, list[tuple[int, int]]] = {v: [] for v in self.vertices}
        for i, e in enumerate(self.edges):
            inc[e.tail].append((i, 1))
            inc[e.head].append((i, -1))
        return inc

    @property
    def genus(self) -> int:
        return genus(self)

    def point(self, edge: str, offset) -> "GraphPoint":
        """Point at distance ``offset`` from the tail of ``edge``.

        Accepts ids of subdivided loops, measuring along the original loop.
        """
        offset = Q(offset)
        loops = dict(self.loops)
        if edge in loops:
            first, second, _ = loops[edge]
            half = self.edge(first).length
            if offset <= half:
                return GraphPoint.on_edge(self, first, offset)
            return GraphPoint.on_edge(self, second, offset - half)
        return GraphPoint.on_edge(self, edge, offset)

    def vertex_point(self, v: str) -> "GraphPoint":
        if v not in self.vertex_index:
            raise InvalidInputError(f"unknown vertex {v!r}")
        return GraphPoint(v, None, ZERO)

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [{"id": e.id, "tail": e.tail, "head": e.head, "length": qstr(e.length)} for e in self.edges],
            "basepoint": self.basepoint,
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    def scaled(self, factor) -> "MetricGraph":
        factor = Q(factor)
        if factor <= 0:
            raise InvalidInputError("scale factor must be positive")
        edges = tuple(Edge(e.id, e.tail, e.head, e.length * factor) for e in self.edges)
        return MetricGraph(self.vertices, edges, self.basepoint, self.loops)


@dataclass(frozen=True, order=True)
class GraphPoint:
    """A point of a metric graph in canonical form.

    Vertex points have ``edge=None``; interior points have ``vertex=None``
    and ``0 < offset < len(edge)``.
    """

    vertex: str | None
    edge: str | None
    offset: mpq = field(default=ZERO)

    @classmethod
    def on_edge(cls, g: MetricGraph, eid: str, offset) -> "GraphPoint":
        if eid not in g.edge_index:
            raise InvalidInputError(f"unknown edge {eid!r}")
        e = g.edge(eid)
        offset = Q(offset)
        if offset < 0 or offset > e.length:
            raise InvalidInputError(f"offset {offset} outside [0, {e.length}] on edge {eid!r}")
        if offset == 0:
            return cls(e.tail, None, ZERO)
        if offset == e.length:
            return cls(e.head, None, ZERO)
        return cls(None, eid, offset)

    @property
    def is_vertex(self) -> bool:
        return self.vertex is not None

    def sort_key(self) -> tuple:
        return (0, self.vertex, "", ZERO) if self.vertex is not None else (1, "", self.edge, self.offset)

    def to_json(self) -> dict:
        if self.vertex is not None:
            return {"vertex": self.vertex}
        return {"edge": self.edge, "offset": qstr(self.offset)}

    def __str__(self) -> str:
        return self.vertex if self.vertex is not None else f"{self.edge}@{self.offset}"


# -- validation ----------------------------------------------------------------

def validate_graph(raw: Mapping[str, Any]) -> MetricGraph:
    """Build the canonical working model from a JSON-style description.

    Loops are subdivided once at their midpoint; edge order is the input order
    with each loop replaced in place by its two halves.
    """
    try:
        verts = [str(v) for v in raw["vertices"]]
        raw_edges = list(raw["edges"])
    except (KeyError, TypeError) as exc:
        raise InvalidInputError("graph needs 'vertices' and 'edges'") from exc
    if not verts:
        raise InvalidInputError("graph has no vertices")
    if len(set(verts)) != len(verts):
        raise InvalidInputError("duplicate vertex ids")
    vset = set(verts)
    edges: list[Edge] = []
    loops = []
    mids = []
    ids = set()
    for k, re in enumerate(raw_edges):
        try:
            eid = str(re.get("id", f"e{k}"))
            tail, head = str(re["tail"]), str(re["head"])
            length = Q(re["length"])
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise InvalidInputError(f"bad edge record {re!r}: {exc}") from exc
        if eid in ids:
            raise InvalidInputError(f"duplicate edge id {eid!r}")
        ids.add(eid)
        if tail not in vset or head not in vset:
            raise InvalidInputError(f"edge {eid!r} has a dangling endpoint")
        if length <= 0:
            raise InvalidInputError(f"edge {eid!r} has non-positive length {length}")
        if tail == head:
            mid = f"{eid}~mid"
            first, second = f"{eid}~a", f"{eid}~b"
            if mid in vset or first in ids or second in ids:
                raise InvalidInputError(f"id clash while subdividing loop {eid!r}")
            edges.append(Edge(first, tail, mid, length / 2))
            edges.append(Edge(second, mid, tail, length / 2))
            loops.append((eid, (first, second, mid)))
            mids.append(mid)
        else:
            edges.append(Edge(eid, tail, head, length))
    basepoint = str(raw.get("basepoint") or verts[0])
    if basepoint not in vset:
        raise InvalidInputError(f"basepoint {basepoint!r} is not a vertex")
    g = MetricGraph(tuple(verts + mids), tuple(edges), basepoint, tuple(loops))
    if not _connected(g):
        raise InvalidInputError("graph is disconnected")
    return g


def _connected(g: MetricGraph) -> bool:
    seen = {g.vertices[0]}
    todo = [g.vertices[0]]
    while todo:
        v = todo.pop()
        for i, _ in g.incident[v]:
            e = g.edges[i]
            for w in (e.tail, e.head):
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
    return len(seen) == len(g.vertices)


def genus(g: MetricGraph) -> int:
    return len(g.edges) - len(g.vertices) + 1


# -- cycle lattice -------------------------------------------------------------

def spanning_tree(g: MetricGraph) -> list[int]:
    """Greedy spanning tree in edge-index order (lexicographically first)."""
    parent = {v: v for v in g.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    tree = []
    for i, e in enumerate(g.edges):
        a, b = find(e.tail), find(e.head)
        if a != b:
            parent[a] = b
            tree.append(i)
    return tree


def _tree_paths(g: MetricGraph, tree: Sequence[int], root: str) -> dict[str, list[tuple[int, int]]]:
    """For each vertex, the signed edge path from ``root`` inside the tree."""
    adj: dict[str, list[tuple[int, int, str]]] = {v: [] for v in g.vertices}
    for i in tree:
        e = g.edges[i]
        adj[e.tail].append((i, 1, e.head))
        adj[e.head].append((i, -1, e.tail))
    paths = {root: []}
    todo = deque([root])
    while todo:
        v = todo.popleft()
        for i, s, w in adj[v]:
            if w not in paths:
                paths[w] = paths[v] + [(i, s)]
                todo.append(w)
    return paths


def cycle_basis(g: MetricGraph) -> list[tuple[int, ...]]:
    """Fundamental cycles as integer edge-coefficient vectors.

    The cycle of a non-tree edge e runs along e from tail to head and returns
    through the tree; cycles are ordered by the index of their non-tree edge.
    """
    tree = spanning_tree(g)
    tset = set(tree)
    paths = _tree_paths(g, tree, g.vertices[0])
    basis = []
    for i, e in enumerate(g.edges):
        if i in tset:
            continue
        c = [0] * len(g.edges)
        c[i] += 1
        # head -> root -> tail, i.e. minus path(head) plus path(tail)
        for j, s in paths[e.head]:
            c[j] -= s
        for j, s in paths[e.tail]:
            c[j] += s
        basis.append(tuple(c))
    return basis


@dataclass(frozen=True)
class JacobianData:
    cycles: tuple[tuple[int, ...], ...]
    gram: tuple[tuple[mpq, ...], ...]
    velocities: tuple[tuple[mpq, ...], ...]  # one per edge, in edge order
    vertex_aj: tuple[tuple[mpq, ...], ...]  # lifted AJ image of each vertex
    genus: int
    basepoint: str
    convention: str = CONVENTION

    @cached_property
    def gram_inverse(self):
        return inverse(self.gram)

    def quad(self, x: Sequence) -> mpq:
        return dot(x, matvec(self.gram, x))


def gram_matrix(g: MetricGraph, cycles: Sequence[Sequence[int]]) -> list[tuple]:
    lens = [e.length for e in g.edges]
    return [
        tuple(sum((ci[k] * cj[k] * lens[k] for k in range(len(lens)) if ci[k] and cj[k]), ZERO) for cj in cycles)
        for ci in cycles
    ]


def jacobian_data(g: MetricGraph, cycles: Sequence[Sequence[int]] | None = None) -> JacobianData:
    """Gram matrix, edge velocities and vertex images for the given (default:
    fundamental) cycle basis."""
    b = genus(g)
    if b == 0:
        raise NoJacobianError("genus 0: the Jacobian is a point")
    cycles = [tuple(c) for c in (cycles if cycles is not None else cycle_basis(g))]
    if len(cycles) != b:
        raise InvalidInputError(f"cycle basis has {len(cycles)} elements, expected {b}")
    gram = gram_matrix(g, cycles)
    if any(m <= 0 for m in leading_minors(gram)):
        raise ArithmeticError("Gram matrix is not positive definite")
    ginv = inverse(gram)
    vel = tuple(matvec(ginv, [mpq(c[i]) for c in cycles]) for i in range(len(g.edges)))
    tree = spanning_tree(g)
    paths = _tree_paths(g, tree, g.basepoint)
    vaj = []
    for v in g.vertices:
        x = zeros(b)
        for i, s in paths[v]:
            x = add(x, scale(s * g.edges[i].length, vel[i]))
        vaj.append(x)
    return JacobianData(tuple(cycles), tuple(tuple(r) for r in gram), vel, tuple(vaj), b, g.basepoint)


def lift_point(j: JacobianData, g: MetricGraph, x: GraphPoint) -> tuple:
    """A lift to R^b of the Abel-Jacobi image of ``x``."""
    if x.vertex is not None:
        return j.vertex_aj[g.vertex_index[x.vertex]]
    i = g.edge_index[x.edge]
    e = g.edges[i]
    return add(j.vertex_aj[g.vertex_index[e.tail]], scale(x.offset, j.velocities[i]))


def abel_jacobi_point(j: JacobianData, g: MetricGraph, x: GraphPoint) -> "TorusPoint":
    return TorusPoint.of(lift_point(j, g, x))


def path_image(j: JacobianData, g: MetricGraph, steps: Iterable[tuple[str, int]], end: tuple[str, mpq] | None = None) -> tuple:
    """Integrate along an explicit walk from the basepoint.

    ``steps`` are ``(edge id, +1/-1)`` traversals; ``end`` optionally adds a
    final partial move ``(edge id, signed distance)`` from the walk's endpoint.
    """
    x = zeros(j.genus)
    for eid, s in steps:
        i = g.edge_index[eid]
        x = add(x, scale(s * g.edges[i].length, j.velocities[i]))
    if end is not None:
        eid, t = end
        x = add(x, scale(Q(t), j.velocities[g.edge_index[eid]]))
    return x


@dataclass(frozen=True)
class TorusPoint:
    """Point of R^b / Z^b stored by its representative in [0,1)^b."""

    coords: tuple[mpq, ...]

    @classmethod
    def of(cls, v: Sequence) -> "TorusPoint":
        return cls(frac_vec(v))

    def __add__(self, other: "TorusPoint") -> "TorusPoint":
        return TorusPoint.of(add(self.coords, other.coords))

    def __sub__(self, other: "TorusPoint") -> "TorusPoint":
        return TorusPoint.of(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __mul__(self, k: int) -> "TorusPoint":
        return TorusPoint.of(scale(k, self.coords))

    __rmul__ = __mul__

    def to_json(self) -> list[str]:
        return [qstr(x) for x in self.coords]

    @property
    def is_zero(self) -> bool:
        return not any(self.coords)


# -- standard families ---------------------------------------------------------

def _raw(vertices: Iterable[str], edges: Iterable[tuple[str, str, str, Any]], basepoint: str | None = None) -> dict:
    raw = {
        "vertices": list(vertices),
        "edges": [{"id": i, "tail": t, "head": h, "length": str(Q(l))} for i, t, h, l in edges],
    }
    if basepoint is not None:
        raw["basepoint"] = basepoint
    return raw


def bouquet(lengths: Sequence) -> MetricGraph:
    return validate_graph(_raw(["v"], [(f"e{i + 1}", "v", "v", l) for i, l in enumerate(lengths)]))


def theta_graph(lengths: Sequence = (1, 1, 1)) -> MetricGraph:
    return validate_graph(_raw(["u", "v"], [(f"e{i + 1}", "u", "v", l) for i, l in enumerate(lengths)]))


def circle(length=1) -> MetricGraph:
    return validate_graph(_raw(["v"], [("e1", "v", "v", length)]))


def dumbbell(l1=1, bridge=1, l2=1) -> MetricGraph:
    return validate_graph(_raw(["u", "v"], [("a", "u", "u", l1), ("br", "u", "v", bridge), ("c", "v", "v", l2)]))


def complete_graph_k4(lengths: Sequence | None = None) -> MetricGraph:
    pairs = [("0", "1"), ("0", "2"), ("0", "3"), ("1", "2"), ("1", "3"), ("2", "3")]
    lengths = lengths or [1] * 6
    return validate_graph(_raw(["0", "1", "2", "3"], [(f"e{a}{b}", a, b, l) for (a, b), l in zip(pairs, lengths)]))


def path_tree(n: int = 3) -> MetricGraph:
    return validate_graph(_raw([str(i) for i in range(n)], [(f"t{i}", str(i), str(i + 1), 1) for i in range(n - 1)]))


def from_edge_list(vertices: Sequence[str], edges: Sequence[tuple[str, str]], lengths: Sequence | None = None) -> MetricGraph:
    lengths = lengths or [1] * len(edges)
    return validate_graph(_raw(vertices, [(f"e{k}", a, b, l) for k, ((a, b), l) in enumerate(zip(edges, lengths))]))
