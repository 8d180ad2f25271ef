"""Cell complexes on the torus R^b / Z^b and their integral homology.

Every cell is stored through one lift: a convex rational polytope in R^b,
normalized so that its lexicographically smallest vertex lies in [0,1)^b.
Orientations are translation invariant (the ordered basis of difference
vectors from the smallest vertex), so identified faces always carry the same
orientation and the transported sign is +1.
"""
from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field
from itertools import combinations
from math import comb, factorial
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .errors import InvalidInputError, RegularityError
from .linalg import Chart, centroid, det, direction_basis, qstr, sign, sub
from .polytope import Polytope, canonical_key
from .snf import invariant_factors


# -- chain complexes -----------------------------------------------------------

@dataclass
class ChainComplex:
    """Free chain complex with sparse boundary maps.

    ``boundaries[k]`` maps a k-cell index to its (k-1)-chain; ``boundaries[0]``
    is empty.
    """

    sizes: list[int]
    boundaries: list[dict[int, dict[int, int]]]

    @property
    def top(self) -> int:
        return len(self.sizes) - 1

    def d(self, k: int) -> dict[int, dict[int, int]]:
        if k <= 0 or k > self.top:
            return {}
        return self.boundaries[k]

    def check(self) -> None:
        """Verify d_{k-1} d_k = 0; raises RegularityError naming bad cells."""
        for k in range(2, self.top + 1):
            low = self.d(k - 1)
            for c, chain in self.d(k).items():
                acc: dict[int, int] = {}
                for f, a in chain.items():
                    for g, b_ in low.get(f, {}).items():
                        acc[g] = acc.get(g, 0) + a * b_
                bad = {g: v for g, v in acc.items() if v}
                if bad:
                    raise RegularityError(f"boundary of boundary nonzero at {k}-cell {c}", [(k, c)])

    def euler(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.sizes))


@dataclass(frozen=True)
class HomologyGroup:
    free_rank: int
    torsion: tuple[int, ...] = ()

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self) -> str:
        parts = [f"Z^{self.free_rank}"] if self.free_rank else []
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) or "0"


@dataclass(frozen=True)
class HomologyResult:
    groups: tuple[HomologyGroup, ...]

    def __getitem__(self, k: int) -> HomologyGroup:
        if 0 <= k < len(self.groups):
            return self.groups[k]
        return HomologyGroup(0)

    @property
    def betti(self) -> tuple[int, ...]:
        return tuple(g.free_rank for g in self.groups)

    def euler(self) -> int:
        return sum((-1) ** k * g.free_rank for k, g in enumerate(self.groups))

    def reduced(self) -> "HomologyResult":
        g0 = self[0]
        if g0.free_rank == 0:
            return self
        return HomologyResult((HomologyGroup(g0.free_rank - 1, g0.torsion),) + self.groups[1:])

    def vanishes_through(self, d: int) -> bool:
        return all(self[k].is_zero for k in range(d + 1))

    def to_json(self) -> list[dict]:
        return [{"dim": k, "free_rank": g.free_rank, "torsion": list(g.torsion)} for k, g in enumerate(self.groups)]


def homology(cc: ChainComplex) -> HomologyResult:
    """H_k = Z^(dim ker d_k - rank d_{k+1}) + torsion from invariant factors of d_{k+1}."""
    invs = [invariant_factors(cc.d(k)) if k else [] for k in range(cc.top + 2)]
    groups = []
    for k, n in enumerate(cc.sizes):
        rk = len(invs[k])
        nxt = invs[k + 1]
        free = n - rk - len(nxt)
        groups.append(HomologyGroup(free, tuple(x for x in nxt if x > 1)))
    return HomologyResult(tuple(groups))


def _restrict(cols: Mapping[int, Mapping[int, int]], keep_cols: Mapping[int, int], keep_rows: Mapping[int, int]) -> dict:
    out = {}
    for c, chain in cols.items():
        if c not in keep_cols:
            continue
        sub_chain = {keep_rows[r]: v for r, v in chain.items() if r in keep_rows and v}
        if sub_chain:
            out[keep_cols[c]] = sub_chain
    return out


# -- geometry of oriented cells ------------------------------------------------

_FAULTS: set[str] = set()


@contextmanager
def inject_fault(name: str):
    """Deliberately corrupt incidence signs (``"sign"``) to exercise the
    verification harness."""
    _FAULTS.add(name)
    try:
        yield
    finally:
        _FAULTS.discard(name)


def orientation_basis(vertices: Sequence[Sequence]) -> list[tuple]:
    return direction_basis(vertices)


def incidence_sign(cell_vertices, cell_chart: Chart, face_vertices) -> int:
    """+1 if the face's orientation agrees with the induced boundary orientation.

    Boundary orientation convention: outward vector first, then the face's basis.
    """
    out = sub(centroid(face_vertices), centroid(cell_vertices))
    vecs = [out] + orientation_basis(face_vertices)
    m = [cell_chart.coords(v) for v in vecs]
    s = sign(det(m))
    if s == 0:
        raise RegularityError("degenerate incidence: face is not on the cell boundary")
    if "sign" in _FAULTS and next(x for x in out if x) < 0:
        return -s
    return s


def simplex_integrals(simplex: Sequence[Sequence], orient: Chart, k: int, b: int) -> list:
    """Oriented integrals of dx_I over a k-simplex for all k-subsets I."""
    edges = [sub(p, simplex[0]) for p in simplex[1:]]
    s = sign(det([orient.coords(e) for e in edges]))
    out = []
    for idx in combinations(range(b), k):
        out.append(s * det([[e[i] for i in idx] for e in edges]) / factorial(k))
    return out


# -- torus complexes ---------------------------------------------------------

@dataclass
class Cell:
    dim: int
    vertices: tuple  # canonical lift, sorted
    label: str = ""

    @property
    def polytope(self) -> Polytope:
        return Polytope.from_points(self.vertices)


@dataclass
class TorusCellComplex:
    b: int
    cells: list[list[Cell]]
    boundary: list[dict[int, dict[int, int]]]
    flags: dict[str, list[set[int]]] = field(default_factory=dict)

    # -- bookkeeping ------------------------------------------------------
    @property
    def top(self) -> int:
        return len(self.cells) - 1

    def counts(self, flag: str | None = None) -> list[int]:
        if flag is None:
            return [len(c) for c in self.cells]
        return [len(s) for s in self.flags[flag]]

    def euler(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.counts()))

    def index(self) -> dict[tuple, tuple[int, int]]:
        return {c.vertices: (k, i) for k, cs in enumerate(self.cells) for i, c in enumerate(cs)}

    def check_flag(self, flag: str) -> None:
        sel = self.flags.get(flag)
        if sel is None:
            raise InvalidInputError(f"unknown flag {flag!r}")
        for k in range(1, self.top + 1):
            for i in sel[k]:
                for f in self.boundary[k].get(i, {}):
                    if f not in sel[k - 1]:
                        raise RegularityError(f"flag {flag!r} is not closed under faces", [(k, i), (k - 1, f)])

    # -- chain complexes ----------------------------------------------------
    def chain_complex(self, flag: str | None = None, mode: str = "sub") -> ChainComplex:
        """Cellular chains: whole complex, flagged subcomplex, or the quotient
        by the flagged subcomplex (``mode="relative"``)."""
        if flag is None:
            return ChainComplex(self.counts(), [dict(bd) for bd in self.boundary])
        self.check_flag(flag)
        sel = self.flags[flag]
        if mode == "sub":
            keep = [sorted(sel[k]) for k in range(self.top + 1)]
        elif mode == "relative":
            keep = [[i for i in range(len(self.cells[k])) if i not in sel[k]] for k in range(self.top + 1)]
        else:
            raise ValueError(mode)
        maps = [{old: new for new, old in enumerate(ks)} for ks in keep]
        bds = [{}] + [_restrict(self.boundary[k], maps[k], maps[k - 1]) for k in range(1, self.top + 1)]
        return ChainComplex([len(ks) for ks in keep], bds)

    def homology(self, flag: str | None = None) -> HomologyResult:
        return homology(self.chain_complex(flag))

    def relative_homology(self, flag: str) -> HomologyResult:
        return homology(self.chain_complex(flag, mode="relative"))

    def check(self) -> None:
        self.chain_complex().check()

    # -- geometry -----------------------------------------------------------
    def polytopes(self, flag: str | None = None, maximal: bool = True) -> list[Polytope]:
        """Lifts of the cells (only those not in the closure of another cell)."""
        sel = self.flags[flag] if flag else [set(range(len(cs))) for cs in self.cells]
        covered: list[set[int]] = [set() for _ in self.cells]
        if maximal:
            for k in range(self.top, 0, -1):
                for i in set(sel[k]) | covered[k]:
                    covered[k - 1].update(self.boundary[k].get(i, {}))
        out = []
        for k in range(self.top + 1):
            for i in sorted(sel[k]):
                if i not in covered[k]:
                    out.append(self.cells[k][i].polytope)
        return out

    def zero_cells(self, flag: str | None = None) -> list[tuple]:
        sel = sorted(self.flags[flag][0]) if flag else range(len(self.cells[0]))
        return [self.cells[0][i].vertices[0] for i in sel]

    def integration(self, k: int, i: int) -> list:
        """Integrals of the invariant forms dx_I over the oriented k-cell i.

        On cycles these are the coordinates of the homology class in
        H_k(T^b, Z) = Lambda^k Z^b.
        """
        if k == 0:
            return [mpq(1)]
        verts = self.cells[k][i].vertices
        orient = Chart(orientation_basis(verts))
        poly = Polytope.from_points(verts)
        total = [mpq(0)] * comb(self.b, k)
        for simplex in poly.triangulate():
            for t, v in enumerate(simplex_integrals(simplex, orient, k, self.b)):
                total[t] += v
        return total

    # -- construction -------------------------------------------------------
    @classmethod
    def from_polytopes(cls, b: int, polys: Iterable[Polytope], label: str = "", max_dim: int | None = None) -> "TorusCellComplex":
        """Face-to-face periodic complex generated by the lifts ``polys``."""
        keys: dict[tuple, int] = {}
        for P in polys:
            for d, faces in P.face_lattice.items():
                if max_dim is not None and d > max_dim:
                    continue
                for f in faces:
                    keys.setdefault(canonical_key([P.vertices[i] for i in f]), d)
        top = max(keys.values()) if keys else -1
        cells = [sorted(k for k, d in keys.items() if d == dim) for dim in range(top + 1)]
        idx = [{k: i for i, k in enumerate(cs)} for cs in cells]
        boundary: list[dict[int, dict[int, int]]] = [{}]
        for dim in range(1, top + 1):
            bd = {}
            for i, verts in enumerate(cells[dim]):
                poly = Polytope.from_points(verts)
                chart = Chart(orientation_basis(verts))
                chain: dict[int, int] = {}
                for f in poly.faces(dim - 1):
                    fv = [poly.vertices[j] for j in f]
                    j = idx[dim - 1][canonical_key(fv)]
                    chain[j] = chain.get(j, 0) + incidence_sign(verts, chart, fv)
                bd[i] = {j: v for j, v in chain.items() if v}
            boundary.append(bd)
        return cls(b, [[Cell(d, k, label) for k in cs] for d, cs in enumerate(cells)], boundary)

    # -- export --------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "b": self.b,
            "counts": self.counts(),
            "cells": [[[[qstr(x) for x in v] for v in c.vertices] for c in cs] for cs in self.cells],
            "flags": {name: [sorted(s) for s in sel] for name, sel in sorted(self.flags.items())},
        }


def cube_torus(b: int, d: int | None = None) -> TorusCellComplex:
    """The d-skeleton of the CW torus obtained from the unit cube."""
    from itertools import product

    d = b if d is None else d
    cube = Polytope.from_points(product((mpq(0), mpq(1)), repeat=b)) if b else None
    if cube is None:
        raise InvalidInputError("b must be positive")
    return TorusCellComplex.from_polytopes(b, [cube], label="cube", max_dim=d)
