"""Exact convex polytopes in R^n with rational data.

A :class:`Polytope` keeps both representations: its vertex list and an
inequality description relative to its affine hull.  Faces are reported as
frozensets of vertex indices.  Polytopes are also used as "torus polytopes":
a lift to R^n of a polytope in R^n / Z^n, with :func:`canonical_key` picking
the representative whose lexicographically smallest vertex lies in [0,1)^n.
"""
from __future__ import annotations

from functools import cached_property
from itertools import combinations, product
from math import ceil, factorial, floor
from typing import Iterable, Iterator, Sequence

from gmpy2 import mpq

from .linalg import (
    ZERO,
    Chart,
    add,
    affine_rank,
    centroid,
    det,
    direction_basis,
    dot,
    floor_vec,
    nullspace,
    rank,
    solve,
    sub,
    transpose,
)

Point = tuple
Halfspace = tuple  # (normal, offset) meaning normal . x <= offset


def _normalize(a: Sequence, beta) -> tuple[tuple, mpq]:
    """Scale a constraint so its first nonzero coefficient is +-1."""
    lead = next(x for x in a if x)
    s = 1 / abs(lead)
    return tuple(x * s for x in a), beta * s


class Polytope:
    """Convex hull of finitely many rational points."""

    __slots__ = ("vertices", "ambient", "dim", "eqs", "facets", "incidence", "__dict__")

    def __init__(self, vertices, eqs, facets, incidence):
        self.vertices: tuple[Point, ...] = vertices
        self.ambient = len(vertices[0])
        self.dim = affine_rank(vertices)
        self.eqs: tuple[Halfspace, ...] = eqs
        self.facets: tuple[Halfspace, ...] = facets
        self.incidence: tuple[frozenset, ...] = incidence

    # -- construction ---------------------------------------------------
    @classmethod
    def from_points(cls, points: Iterable[Sequence]) -> "Polytope":
        pts = sorted({tuple(mpq(x) for x in p) for p in points})
        if not pts:
            raise ValueError("empty point set")
        n = len(pts[0])
        p0 = pts[0]
        diffs = [sub(p, p0) for p in pts[1:]]
        normals = nullspace(diffs, n) if diffs else [tuple(mpq(int(i == j)) for j in range(n)) for i in range(n)]
        eqs = tuple(_normalize(a, dot(a, p0)) for a in normals)
        k = n - len(normals)
        if k == 0:
            return cls((p0,), eqs, (), ())
        basis = direction_basis(pts)
        chart = Chart(basis)
        local = [chart.coords(sub(p, p0)) for p in pts]
        cands = []
        seen = set()
        for sub_idx in combinations(range(len(pts)), k):
            base = local[sub_idx[0]]
            rows = [sub(local[i], base) for i in sub_idx[1:]]
            if rows and rank(rows) < k - 1:
                continue
            ns = nullspace(rows, k) if rows else [(mpq(1),)]
            if len(ns) != 1:
                continue
            a = ns[0]
            beta = dot(a, base)
            vals = [dot(a, c) - beta for c in local]
            if all(v <= 0 for v in vals):
                pass
            elif all(v >= 0 for v in vals):
                a, beta = tuple(-x for x in a), -beta
            else:
                continue
            # lift the local normal back to an ambient vector in the direction space
            amb = _lift_normal(basis, a)
            off = beta + dot(amb, p0)
            key = _normalize(amb, off)
            if key not in seen:
                seen.add(key)
                cands.append(key)
        return cls._assemble(pts, eqs, cands, k)

    @classmethod
    def from_hrep(cls, ineqs: Sequence[Halfspace], eqs: Sequence[Halfspace] = (), ambient: int | None = None) -> "Polytope | None":
        """Vertex enumeration by exact facet-subset intersection.

        Returns None when the system is infeasible.  The region must be bounded.
        """
        n = ambient if ambient is not None else len((list(ineqs) + list(eqs))[0][0])
        if eqs:
            x0 = solve([a for a, _ in eqs], [b for _, b in eqs])
            if x0 is None:
                return None
            null = nullspace([a for a, _ in eqs], n)
        else:
            x0 = tuple(ZERO for _ in range(n))
            null = [tuple(mpq(int(i == j)) for j in range(n)) for i in range(n)]
        k = len(null)
        if k == 0:
            if all(dot(a, x0) <= b for a, b in ineqs):
                return cls.from_points([x0])
            return None
        nt = transpose(null)  # n x k
        red = [(tuple(dot(a, col) for col in null), b - dot(a, x0)) for a, b in ineqs]
        verts = set()
        for idx in combinations(range(len(red)), k):
            rows = [red[i][0] for i in idx]
            if rank(rows) < k:
                continue
            y = solve(rows, [red[i][1] for i in idx])
            if y is None:
                continue
            if all(dot(a, y) <= b for a, b in red):
                verts.add(tuple(x0[i] + dot(nt[i], y) for i in range(n)))
        if not verts:
            return None
        pts = sorted(verts)
        hull = cls.from_points(pts) if len(pts) == 1 else None
        if hull is not None:
            return hull
        # reuse the given inequalities as facet candidates
        pe = pts[0]
        diffs = [sub(p, pe) for p in pts[1:]]
        normals = nullspace(diffs, n)
        heqs = tuple(_normalize(a, dot(a, pe)) for a in normals)
        cands = []
        for a, b in ineqs:
            if any(a):
                cands.append(_normalize(a, b))
        return cls._assemble(pts, heqs, cands, n - len(normals))

    @classmethod
    def _assemble(cls, pts, eqs, cands, k) -> "Polytope":
        facets = []
        tights = []
        seen = set()
        for a, b in cands:
            tight = frozenset(i for i, p in enumerate(pts) if dot(a, p) == b)
            if tight in seen or len(tight) < k:
                continue
            if any(dot(a, p) > b for p in pts):
                continue
            if affine_rank([pts[i] for i in tight]) != k - 1:
                continue
            seen.add(tight)
            facets.append((a, b))
            tights.append(tight)
        # keep only genuine vertices: points lying on >= k facets of full rank
        keep = []
        for i, p in enumerate(pts):
            normals = [facets[j][0] for j, t in enumerate(tights) if i in t]
            if rank(normals + [a for a, _ in eqs]) == len(p):
                keep.append(i)
        if len(keep) != len(pts):
            remap = {old: new for new, old in enumerate(keep)}
            pts = [pts[i] for i in keep]
            tights = [frozenset(remap[i] for i in t if i in remap) for t in tights]
        order = sorted(range(len(facets)), key=lambda j: sorted(tights[j]))
        return cls(tuple(pts), tuple(eqs), tuple(facets[j] for j in order), tuple(tights[j] for j in order))

    # -- basic queries --------------------------------------------------
    def __repr__(self) -> str:
        return f"Polytope(dim={self.dim}, nverts={len(self.vertices)})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Polytope) and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)

    @property
    def constraints(self) -> list[Halfspace]:
        """All defining halfspaces, hull equations split into two."""
        out = list(self.facets)
        for a, b in self.eqs:
            out.append((a, b))
            out.append((tuple(-x for x in a), -b))
        return out

    def contains(self, x: Sequence) -> bool:
        return all(dot(a, x) == b for a, b in self.eqs) and all(dot(a, x) <= b for a, b in self.facets)

    def contains_polytope(self, other: "Polytope") -> bool:
        return all(self.contains(v) for v in other.vertices)

    @cached_property
    def bbox(self) -> tuple[tuple, tuple]:
        cols = list(zip(*self.vertices))
        return tuple(min(c) for c in cols), tuple(max(c) for c in cols)

    @cached_property
    def center(self) -> Point:
        return centroid(self.vertices)

    def translate(self, v: Sequence) -> "Polytope":
        v = tuple(mpq(x) for x in v)
        verts = tuple(add(p, v) for p in self.vertices)
        eqs = tuple((a, b + dot(a, v)) for a, b in self.eqs)
        facets = tuple((a, b + dot(a, v)) for a, b in self.facets)
        return Polytope(verts, eqs, facets, self.incidence)

    # -- face lattice ---------------------------------------------------
    @cached_property
    def face_lattice(self) -> dict[int, list[frozenset]]:
        """Faces by dimension, each a frozenset of vertex indices."""
        allv = frozenset(range(len(self.vertices)))
        out = {self.dim: [allv]}
        if self.dim == 0:
            return out
        current = list(self.incidence)
        out[self.dim - 1] = sorted(current, key=sorted)
        for d in range(self.dim - 2, -1, -1):
            nxt = set()
            for f in current:
                for g in self.incidence:
                    s = f & g
                    if s and s != f and affine_rank([self.vertices[i] for i in s]) == d:
                        nxt.add(s)
            current = sorted(nxt, key=sorted)
            out[d] = current
        return out

    def faces(self, d: int) -> list[frozenset]:
        return self.face_lattice.get(d, [])

    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(self.faces(d)) for d in range(self.dim + 1))

    def face(self, idx: frozenset) -> "Polytope":
        return Polytope.from_points([self.vertices[i] for i in idx])

    def edges(self) -> list[tuple[int, int]]:
        return [tuple(sorted(e)) for e in self.faces(1)]

    # -- operations -----------------------------------------------------
    def split(self, a: Sequence, beta) -> tuple["Polytope | None", "Polytope | None"]:
        """Intersections with ``a.x <= beta`` and ``a.x >= beta``."""
        vals = [dot(a, p) - beta for p in self.vertices]
        if all(v <= 0 for v in vals):
            return self, (self._restrict_to_zero(vals) if any(v == 0 for v in vals) else None)
        if all(v >= 0 for v in vals):
            return (self._restrict_to_zero(vals) if any(v == 0 for v in vals) else None), self
        cut = []
        for i, j in self.edges():
            vi, vj = vals[i], vals[j]
            if (vi < 0 < vj) or (vj < 0 < vi):
                t = vi / (vi - vj)
                p, q = self.vertices[i], self.vertices[j]
                cut.append(tuple(x + t * (y - x) for x, y in zip(p, q)))
        on = [p for p, v in zip(self.vertices, vals) if v == 0]
        lo = [p for p, v in zip(self.vertices, vals) if v < 0] + on + cut
        hi = [p for p, v in zip(self.vertices, vals) if v > 0] + on + cut
        a = tuple(mpq(x) for x in a)
        neg = tuple(-x for x in a)
        return (
            self._piece(lo, list(self.facets) + [(a, mpq(beta))]),
            self._piece(hi, list(self.facets) + [(neg, -mpq(beta))]),
        )

    def _restrict_to_zero(self, vals) -> "Polytope":
        return Polytope.from_points([p for p, v in zip(self.vertices, vals) if v == 0])

    def _piece(self, pts, cands) -> "Polytope":
        pts = sorted(set(pts))
        if affine_rank(pts) < self.dim:
            return Polytope.from_points(pts)
        return Polytope._assemble(pts, self.eqs, [_normalize(a, b) for a, b in cands if any(a)], self.dim)

    def triangulate(self) -> list[tuple[Point, ...]]:
        """Pulling triangulation from the first vertex; simplices as vertex tuples."""
        if self.dim == 0:
            return [self.vertices]
        if self.dim == 1:
            return [self.vertices]
        v0 = 0
        out = []
        for j, tight in enumerate(self.incidence):
            if v0 in tight:
                continue
            sub_poly = self.face(tight)
            for simplex in sub_poly.triangulate():
                out.append((self.vertices[v0],) + simplex)
        return out

    def volume(self) -> mpq:
        """Euclidean volume for full-dimensional polytopes."""
        if self.dim != self.ambient:
            return ZERO
        total = ZERO
        for s in self.triangulate():
            total += abs(det([sub(p, s[0]) for p in s[1:]]))
        return total / factorial(self.dim)


def _lift_normal(basis: Sequence[Sequence], a_local: Sequence) -> tuple:
    """Ambient vector n in span(basis) with n . b_i = a_local[i]."""
    k = len(basis)
    gram = [[dot(basis[i], basis[j]) for j in range(k)] for i in range(k)]
    y = solve(gram, list(a_local))
    n = len(basis[0])
    return tuple(sum((y[i] * basis[i][c] for i in range(k)), ZERO) for c in range(n))


# -- torus helpers ------------------------------------------------------------

def canonical_shift(points: Sequence[Sequence]) -> tuple[int, ...]:
    """Integer shift moving the lexicographically smallest point into [0,1)^n."""
    return tuple(-x for x in floor_vec(min(points)))


def canonical_key(points: Iterable[Sequence]) -> tuple:
    pts = sorted(tuple(p) for p in points)
    s = canonical_shift(pts)
    return tuple(tuple(x + y for x, y in zip(p, s)) for p in pts)


def lattice_shifts(box_a: tuple[tuple, tuple], box_b: tuple[tuple, tuple]) -> Iterator[tuple[int, ...]]:
    """All integer vectors t with (box_a + t) meeting box_b (closed boxes)."""
    (alo, ahi), (blo, bhi) = box_a, box_b
    ranges = [range(ceil(bl - ah), floor(bh - al) + 1) for al, ah, bl, bh in zip(alo, ahi, blo, bhi)]
    return product(*ranges)


def point_in_union(x: Sequence, polys: Sequence[Polytope]) -> bool:
    """Is ``x`` (mod Z^n) in the union of the given torus polytopes?"""
    box = (tuple(x), tuple(x))
    for p in polys:
        for t in lattice_shifts(p.bbox, box):
            y = tuple(xi - ti for xi, ti in zip(x, t))
            if p.contains(y):
                return True
    return False


def covered(piece: Polytope, polys: Sequence[Polytope], modulo_lattice: bool = True) -> bool:
    """Exact test of ``piece`` being contained in the union of ``polys``.

    Binary space partition of ``piece`` by the defining hyperplanes of the
    lifts that meet it: a fragment that no hyperplane cuts is either inside a
    lift or has its relative interior outside all of them.
    """
    cands = []
    for p in polys:
        shifts = lattice_shifts(p.bbox, piece.bbox) if modulo_lattice else [tuple(0 for _ in range(piece.ambient))]
        for t in shifts:
            cands.append(p.translate(t) if any(t) else p)
    return _cover(piece, cands)


def _separated(piece: Polytope, q: Polytope) -> bool:
    for a, b in q.constraints:
        vals = [dot(a, v) - b for v in piece.vertices]
        if min(vals) >= 0 and max(vals) > 0:
            return True
    return False


def _cover(piece: Polytope, cands: list[Polytope]) -> bool:
    live = [q for q in cands if not _separated(piece, q)]
    for q in live:
        if q.contains_polytope(piece):
            return True
    for q in live:
        for a, b in q.constraints:
            vals = [dot(a, v) - b for v in piece.vertices]
            if min(vals) < 0 < max(vals):
                lo, hi = piece.split(a, b)
                return _cover(lo, live) and _cover(hi, live)
    return False
