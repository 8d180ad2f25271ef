"""Voronoi cells of Z^b under a positive definite form, and theta skeleta."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import isqrt
from typing import Sequence

from gmpy2 import mpq

from .complex import TorusCellComplex
from .errors import InvalidInputError
from .guards import DEFAULT, Guards
from .linalg import add, dot, frac_vec, inverse, leading_minors, matvec, sub
from .polytope import Polytope, covered


def _quad(G, x) -> mpq:
    return dot(x, matvec(G, x))


def relevant_vectors(G: Sequence[Sequence], guards: Guards = DEFAULT) -> list[tuple[int, ...]]:
    """Voronoi-relevant vectors: strict minima (up to sign) of each coset mod 2Z^b.

    Every minimizer x of a coset c has Q(x) <= Q(c), hence
    x_i^2 <= Q(c) (G^-1)_ii, which bounds the search box per coordinate.
    """
    b = len(G)
    guards.check("max_b", b)
    G = [[mpq(x) for x in row] for row in G]
    if any(m <= 0 for m in leading_minors(G)):
        raise InvalidInputError("Gram matrix is not positive definite")
    ginv = inverse(G)
    out = []
    for c in product((0, 1), repeat=b):
        if not any(c):
            continue
        qc = _quad(G, c)
        ranges = []
        for i in range(b):
            r2 = qc * ginv[i][i]
            r = isqrt(int(r2.__floor__()))
            # coordinates congruent to c_i mod 2 with |x_i| <= r
            lo = -r if (r - c[i]) % 2 == 0 else -r + 1
            ranges.append(range(lo, r + 1, 2))
        best, arg = None, []
        for x in product(*ranges):
            q = _quad(G, x)
            if best is None or q < best:
                best, arg = q, [x]
            elif q == best:
                arg.append(x)
        if len(arg) == 2:
            out.extend(arg)
    return sorted(out)


@dataclass
class VoronoiCell:
    gram: tuple
    relevant: list[tuple[int, ...]]
    polytope: Polytope = field(repr=False)

    @property
    def b(self) -> int:
        return len(self.gram)

    @property
    def vertices(self):
        return self.polytope.vertices

    @property
    def facets(self):
        return self.polytope.facets

    def f_vector(self) -> tuple[int, ...]:
        return self.polytope.f_vector()

    def faces(self, d: int) -> list[Polytope]:
        return [self.polytope.face(f) for f in self.polytope.faces(d)]

    def to_json(self) -> dict:
        from .linalg import qstr

        return {
            "gram": [[qstr(x) for x in row] for row in self.gram],
            "relevant_vectors": [list(v) for v in self.relevant],
            "vertices": [[qstr(x) for x in v] for v in self.vertices],
            "f_vector": list(self.f_vector()),
        }


def voronoi_cell(G: Sequence[Sequence], guards: Guards = DEFAULT) -> VoronoiCell:
    """H-representation from relevant vectors, then exact vertex enumeration."""
    rel = relevant_vectors(G, guards)
    G = tuple(tuple(mpq(x) for x in row) for row in G)
    ineqs = []
    for lam in rel:
        glam = matvec(G, lam)
        ineqs.append((glam, _quad(G, lam) / 2))
    poly = Polytope.from_hrep(ineqs, ambient=len(G))
    if poly is None or poly.dim != len(G):
        raise ArithmeticError("Voronoi cell is degenerate")
    return VoronoiCell(G, rel, poly)


def theta_skeleton(cell: VoronoiCell, d: int) -> TorusCellComplex:
    """Image in R^b / Z^b of the faces of dimension <= d of the Voronoi cell."""
    if d < 0 or d >= cell.b:
        raise InvalidInputError(f"skeleton dimension must satisfy 0 <= d < {cell.b}, got {d}")
    return TorusCellComplex.from_polytopes(cell.b, [cell.polytope], label="voronoi", max_dim=d)


def voronoi_torus(cell: VoronoiCell) -> TorusCellComplex:
    """The full torus with the CW structure induced by the Voronoi tiling."""
    return TorusCellComplex.from_polytopes(cell.b, [cell.polytope], label="voronoi")


@dataclass
class PolytopeUnion:
    """A finite union of torus polytopes without any cell structure."""

    b: int
    polys: list[Polytope]

    def polytopes(self) -> list[Polytope]:
        return list(self.polys)

    def zero_cells(self) -> list[tuple]:
        return sorted({v for p in self.polys for v in p.vertices})


def _pieces(x) -> tuple[int, list[Polytope], list[tuple]]:
    """Works for TorusCellComplex and PolytopeUnion alike."""
    return x.b, x.polytopes(), x.zero_cells()


def _contained(polys_a: list[Polytope], polys_b: list[Polytope]) -> bool:
    return all(covered(p, polys_b) for p in polys_a)


def translate_matches(A, B) -> list[tuple]:
    """All candidates v (in [0,1)^b) with A + v = B as subsets of the torus.

    Candidates are differences of 0-cells; equality is decided by mutual
    exact containment.
    """
    ba, pa, za = _pieces(A)
    bb, pb, zb = _pieces(B)
    if ba != bb:
        raise InvalidInputError("complexes live in different tori")
    if max((p.dim for p in pa), default=-1) != max((p.dim for p in pb), default=-1):
        return []
    cands = sorted({frac_vec(sub(y, x)) for x in za for y in zb})
    out = []
    for v in cands:
        # cheap filter: a 0-cell of A + v lying outside B rules v out
        if any(not covered(Polytope.from_points([add(x, v)]), pb) for x in za[:8]):
            continue
        shifted = [p.translate(v) for p in pa]
        if _contained(shifted, pb) and _contained(pb, shifted):
            out.append(v)
    return out


def translate_match(A, B) -> tuple | None:
    """The first (lexicographically smallest) translation carrying A onto B."""
    m = translate_matches(A, B)
    return m[0] if m else None
