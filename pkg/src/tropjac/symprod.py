"""Cells of symmetric products of a metric graph and the loci W_d.

A cell of Sym^d is an edge multiset {e: m_e}; its points are per-edge
ordered offsets 0 <= t_1 <= ... <= t_m <= len(e).  The Abel-Jacobi image of
such a point only depends on the per-edge offset sums, so the image of the
whole cell is the zonotope c + sum_e [0, m_e len(e)] w_e.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement, product
from math import comb
from typing import Sequence

from gmpy2 import mpq

from .complex import TorusCellComplex, cube_torus
from .errors import InvalidInputError
from .graph import JacobianData, MetricGraph
from .guards import DEFAULT, Guards
from .linalg import add, qstr, scale, zeros
from .polytope import Polytope, canonical_key, covered


@dataclass(frozen=True)
class SymCell:
    mult: tuple[tuple[int, int], ...]  # (edge index, multiplicity), sorted

    @property
    def dim(self) -> int:
        return sum(m for _, m in self.mult)

    def label(self, g: MetricGraph) -> str:
        return "*".join(f"{g.edges[i].id}^{m}" if m > 1 else g.edges[i].id for i, m in self.mult)


def sym_cells(g: MetricGraph, d: int, guards: Guards = DEFAULT) -> list[SymCell]:
    """All edge multisets of size d, in lexicographic order of edge indices."""
    if d < 1:
        raise InvalidInputError("symmetric power needs d >= 1")
    guards.check("max_d", d)
    out = []
    for combo in combinations_with_replacement(range(len(g.edges)), d):
        out.append(SymCell(tuple(sorted(Counter(combo).items()))))
    return out


@dataclass(frozen=True)
class AffineCellMap:
    """mu(points) = base + sum_e (sum of offsets on e) * w_e."""

    base: tuple
    generators: tuple[tuple[tuple, mpq], ...]  # (w_e, extent m_e len(e))

    def __call__(self, sums: Sequence) -> tuple:
        x = self.base
        for (w, _), s in zip(self.generators, sums):
            x = add(x, scale(mpq(s), w))
        return x


def aj_on_cell(j: JacobianData, g: MetricGraph, cell: SymCell) -> AffineCellMap:
    base = zeros(j.genus)
    gens = []
    for i, m in cell.mult:
        e = g.edges[i]
        base = add(base, scale(m, j.vertex_aj[g.vertex_index[e.tail]]))
        gens.append((j.velocities[i], m * e.length))
    return AffineCellMap(base, tuple(gens))


@dataclass
class WdCell:
    cell: SymCell
    base: tuple
    generators: tuple
    polytope: Polytope

    @property
    def key(self) -> tuple:
        return canonical_key(self.polytope.vertices)

    def to_json(self, g: MetricGraph) -> dict:
        return {
            "cell": self.cell.label(g),
            "base": [qstr(x) for x in self.base],
            "generators": [{"direction": [qstr(x) for x in w], "extent": qstr(t)} for w, t in self.generators],
            "vertices": [[qstr(x) for x in v] for v in self.polytope.vertices],
        }


def zonotope(base: Sequence, generators: Sequence[tuple[Sequence, mpq]]) -> Polytope:
    steps = [scale(t, w) for w, t in generators if any(w)]
    pts = set()
    for pick in product((0, 1), repeat=len(steps)):
        x = tuple(base)
        for on, s in zip(pick, steps):
            if on:
                x = add(x, s)
        pts.add(x)
    return Polytope.from_points(pts)


def wd_cells(j: JacobianData, g: MetricGraph, d: int, guards: Guards = DEFAULT) -> list[WdCell]:
    """One zonotope per Sym^d cell, dropping duplicates and cells contained
    in a single other cell (modulo the lattice)."""
    return list(_wd_cached(j, g, d, guards))


@lru_cache(maxsize=64)
def _wd_cached(j, g, d, guards):
    cells = []
    seen = set()
    for sc in sym_cells(g, d, guards):
        amap = aj_on_cell(j, g, sc)
        gens = tuple((w, t) for w, t in amap.generators if any(w))
        z = zonotope(amap.base, gens)
        key = canonical_key(z.vertices)
        if key in seen:
            continue
        seen.add(key)
        cells.append(WdCell(sc, amap.base, gens, z))
    # larger cells first so containment pruning keeps the big ones
    order = sorted(range(len(cells)), key=lambda i: (-cells[i].polytope.dim, i))
    kept: list[int] = []
    for i in order:
        p = cells[i].polytope
        if any(cells[k].polytope.dim >= p.dim and covered(p, [cells[k].polytope]) for k in kept):
            continue
        kept.append(i)
    return tuple(cells[i] for i in sorted(kept))


def wd_polytopes(j: JacobianData, g: MetricGraph, d: int, guards: Guards = DEFAULT) -> list[Polytope]:
    return [c.polytope for c in wd_cells(j, g, d, guards)]


def cube_torus_skeleton(b: int, d: int) -> TorusCellComplex:
    """(S^1)^b_d: the d-skeleton of the cube CW torus, all boundary maps zero."""
    if b < 1 or d < 0 or d > b:
        raise InvalidInputError("need b >= 1 and 0 <= d <= b")
    tc = cube_torus(b, d)
    assert tc.counts() == [comb(b, k) for k in range(d + 1)]
    return tc
