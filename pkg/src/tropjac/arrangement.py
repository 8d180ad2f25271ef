"""Exact periodic subdivision of the torus adapted to a family of polytopes.

``refine`` starts from the cube CW structure on R^b / Z^b and inserts each
input polytope by binary space partition: a cell meeting a lift of the
polytope is cut by one of the polytope's defining hyperplanes until every
cell is either contained in the lift or has relative interior disjoint from
it.  Cutting a cell first cuts its boundary cells, so cells stay convex and
the boundary of every cell stays a union of cells (cells need not meet
face-to-face).  Only cells that actually meet an input are subdivided.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import floor
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .complex import Cell, TorusCellComplex, incidence_sign, orientation_basis
from .errors import GuardExceededError, InvalidInputError
from .guards import DEFAULT, Guards
from .linalg import Chart, add, dot, primitive, unit
from .polytope import Polytope, canonical_shift, lattice_shifts

Hyperplane = tuple  # (normal, offset): normal . x = offset


@dataclass
class _Cell:
    dim: int
    verts: set
    bnd: list  # [(child id, shift)]
    cob: set = field(default_factory=set)
    flags: set = field(default_factory=set)

    def bbox(self):
        cols = list(zip(*self.verts))
        return tuple(min(c) for c in cols), tuple(max(c) for c in cols)


class _Subdivision:
    def __init__(self, b: int):
        self.b = b
        self.cells: dict[int, _Cell] = {}
        self._next = 0
        self.cuts = 0
        self._cube()

    def _new(self, dim, verts, bnd, flags=()) -> int:
        cid = self._next
        self._next += 1
        self.cells[cid] = _Cell(dim, set(verts), list(bnd), set(), set(flags))
        for f, _ in bnd:
            self.cells[f].cob.add(cid)
        return cid

    def _cube(self):
        b = self.b
        ids = {}
        for size in range(b + 1):
            for subset in (s for s in product((0, 1), repeat=b) if sum(s) == size):
                axes = [i for i in range(b) if subset[i]]
                verts = set()
                for bits in product((0, 1), repeat=len(axes)):
                    p = [mpq(0)] * b
                    for ax, bit in zip(axes, bits):
                        p[ax] = mpq(bit)
                    verts.add(tuple(p))
                bnd = []
                for ax in axes:
                    lower = tuple(0 if i == ax else subset[i] for i in range(b))
                    bnd.append((ids[lower], tuple(0 for _ in range(b))))
                    bnd.append((ids[lower], tuple(int(i == ax) for i in range(b))))
                ids[subset] = self._new(size, verts, bnd)

    # -- cutting -------------------------------------------------------------
    def alive(self, dim: int) -> list[int]:
        return sorted(c for c, cell in self.cells.items() if cell.dim == dim)

    @staticmethod
    def _vals(verts, shift, a, beta):
        off = dot(a, shift) - beta
        return [dot(a, v) + off for v in verts]

    def _straddles(self, cid, shift, a, beta) -> bool:
        vals = self._vals(self.cells[cid].verts, shift, a, beta)
        return min(vals) < 0 < max(vals)

    def cut(self, cid: int, a, beta) -> tuple[int, int, int]:
        """Cut cell ``cid`` (in its own lift) by ``a.x = beta``; returns the
        ids of the pieces on the positive side, negative side and in the plane."""
        self.cuts += 1
        c = self.cells[cid]
        zero_shift = tuple(0 for _ in range(self.b))
        if c.dim == 1:
            (v0, s0), (v1, s1) = c.bnd
            p0 = add(next(iter(self.cells[v0].verts)), s0)
            p1 = add(next(iter(self.cells[v1].verts)), s1)
            f0, f1 = dot(a, p0) - beta, dot(a, p1) - beta
            t = f0 / (f0 - f1)
            x = tuple(u + t * (w - u) for u, w in zip(p0, p1))
            z = self._new(0, [x], [], c.flags)
            e0 = self._new(1, [p0, x], [(v0, s0), (z, zero_shift)], c.flags)
            e1 = self._new(1, [x, p1], [(z, zero_shift), (v1, s1)], c.flags)
            plus, minus = (e0, e1) if f0 > 0 else (e1, e0)
            self._propagate_vertex(cid, x)
        else:
            again = True
            while again:
                again = False
                for f, s in list(c.bnd):
                    if self._straddles(f, s, a, beta):
                        self.cut(f, a, beta - dot(a, s))
                        again = True
                        break
            plus_b, minus_b = [], []
            for f, s in c.bnd:
                vals = self._vals(self.cells[f].verts, s, a, beta)
                if max(vals) > 0:
                    plus_b.append((f, s))
                elif min(vals) < 0:
                    minus_b.append((f, s))
                else:
                    raise AssertionError("boundary facet inside the cutting hyperplane")
            zero_b = []
            seen = set()
            for f, s in c.bnd:
                for g, s2 in self.cells[f].bnd:
                    sh = add(s, s2)
                    key = (g, sh)
                    if key in seen:
                        continue
                    if all(v == 0 for v in self._vals(self.cells[g].verts, sh, a, beta)):
                        seen.add(key)
                        zero_b.append(key)
            on = [v for v in c.verts if dot(a, v) == beta]
            z = self._new(c.dim - 1, on, zero_b, c.flags)
            plus = self._new(c.dim, [v for v in c.verts if dot(a, v) >= beta], plus_b + [(z, zero_shift)], c.flags)
            minus = self._new(c.dim, [v for v in c.verts if dot(a, v) <= beta], minus_b + [(z, zero_shift)], c.flags)
        # replace the cut cell in every parent
        for p in c.cob:
            pc = self.cells[p]
            new_bnd = []
            for f, s in pc.bnd:
                if f == cid:
                    new_bnd.append((plus, s))
                    new_bnd.append((minus, s))
                else:
                    new_bnd.append((f, s))
            pc.bnd = new_bnd
            self.cells[plus].cob.add(p)
            self.cells[minus].cob.add(p)
        for f, _ in c.bnd:
            self.cells[f].cob.discard(cid)
        del self.cells[cid]
        return plus, minus, z

    def _propagate_vertex(self, cid, x):
        todo = [(cid, x)]
        while todo:
            k, y = todo.pop()
            for p in self.cells[k].cob:
                pc = self.cells[p]
                for f, s in pc.bnd:
                    if f == k:
                        w = add(y, s)
                        if w not in pc.verts:
                            pc.verts.add(w)
                            todo.append((p, w))

    # -- insertion -----------------------------------------------------------
    def _flag_closure(self, cid, flag):
        todo = [cid]
        while todo:
            k = todo.pop()
            cell = self.cells[k]
            if flag in cell.flags and k != cid:
                continue
            cell.flags.add(flag)
            todo.extend(f for f, _ in cell.bnd)

    def insert(self, poly: Polytope, flag: str) -> None:
        cons = poly.constraints
        for dim in range(self.b, -1, -1):
            for cid in self.alive(dim):
                if cid in self.cells:
                    self._resolve(cid, poly, cons, flag)

    def _resolve(self, cid, poly, cons, flag):
        work = [cid]
        while work:
            k = work.pop()
            cell = self.cells.get(k)
            if cell is None:
                continue
            for t in lattice_shifts(poly.bbox, cell.bbox()):
                verdict, plane = _classify(cell.verts, cons, t)
                if verdict == "cut":
                    work.extend(self.cut(k, *plane))
                    break
                if verdict == "inside":
                    self._flag_closure(k, flag)
                    break

    def cut_everywhere(self, plane: Hyperplane) -> None:
        """Cut by every lattice translate of a hyperplane."""
        a, beta = plane
        ints, c = primitive(a)
        a, beta = tuple(mpq(x) for x in ints), mpq(beta) * c
        for dim in range(self.b, 0, -1):
            work = self.alive(dim)
            while work:
                k = work.pop()
                cell = self.cells.get(k)
                if cell is None:
                    continue
                vals = [dot(a, v) for v in cell.verts]
                lo, hi = min(vals), max(vals)
                # translates a.x = beta + n strictly inside (lo, hi)
                n = floor(lo - beta) + 1
                if beta + n < hi:
                    work.extend(p for p in self.cut(k, a, beta + n)[:2])

    # -- export --------------------------------------------------------------
    def export(self) -> TorusCellComplex:
        b = self.b
        by_dim: list[list[tuple]] = [[] for _ in range(b + 1)]
        canon = {}
        for cid, cell in self.cells.items():
            pts = sorted(cell.verts)
            s = canonical_shift(pts)
            key = tuple(add(p, s) for p in pts)
            canon[cid] = key
            by_dim[cell.dim].append((key, cid))
        for lst in by_dim:
            lst.sort()
        index = {cid: i for lst in by_dim for i, (_, cid) in enumerate(lst)}
        flag_names = sorted({f for cell in self.cells.values() for f in cell.flags})
        flags = {name: [set() for _ in range(b + 1)] for name in flag_names}
        boundary: list[dict[int, dict[int, int]]] = [{}]
        for dim in range(1, b + 1):
            bd = {}
            for key, cid in by_dim[dim]:
                cell = self.cells[cid]
                verts = sorted(cell.verts)
                chart = Chart(orientation_basis(verts))
                chain: dict[int, int] = {}
                for f, s in cell.bnd:
                    fv = [add(v, s) for v in self.cells[f].verts]
                    j = index[f]
                    chain[j] = chain.get(j, 0) + incidence_sign(verts, chart, fv)
                bd[index[cid]] = {j: v for j, v in chain.items() if v}
            boundary.append(bd)
        for cid, cell in self.cells.items():
            for name in cell.flags:
                flags[name][cell.dim].add(index[cid])
        cells = [[Cell(dim, key) for key, _ in lst] for dim, lst in enumerate(by_dim)]
        return TorusCellComplex(b, cells, boundary, flags)


def _classify(verts, cons, shift):
    """'outside' if the relative interior misses the shifted polytope,
    'inside' if the cell lies in it, else 'cut' with a straddling plane."""
    straddle = None
    for a, beta in cons:
        off = beta + dot(a, shift)
        lo = hi = None
        for v in verts:
            x = dot(a, v) - off
            if lo is None or x < lo:
                lo = x
            if hi is None or x > hi:
                hi = x
        if lo >= 0 and hi > 0:
            return "outside", None
        if lo < 0 < hi and straddle is None:
            straddle = (a, off)
    if straddle is not None:
        return "cut", straddle
    return "inside", None


@dataclass
class ArrangementComplex(TorusCellComplex):
    hyperplanes: list = field(default_factory=list)
    cut_count: int = 0


def refine(
    polytopes: Sequence[Polytope] | Mapping[str, Sequence[Polytope]],
    b: int,
    extra_hyperplanes: Iterable[Hyperplane] = (),
    half_integer: bool = False,
    guards: Guards = DEFAULT,
) -> ArrangementComplex:
    """Subdivide T^b so that each input polytope is a union of cells.

    ``polytopes`` is either a list (flag ``"input"``) or a mapping from flag
    names to lists.  Flags are closed under taking faces.
    """
    if b <= 0:
        raise InvalidInputError("ambient dimension must be positive")
    if b > guards.max_b_homology:
        raise GuardExceededError(f"arrangement dimension {b} exceeds guard {guards.max_b_homology}")
    groups = dict(polytopes) if isinstance(polytopes, Mapping) else {"input": list(polytopes)}
    sub = _Subdivision(b)
    planes = list(extra_hyperplanes)
    if half_integer:
        planes += [(unit(b, i), mpq(1, 2)) for i in range(b)]
    for plane in planes:
        sub.cut_everywhere(plane)
    used = []
    for flag in sorted(groups):
        for poly in groups[flag]:
            if poly.ambient != b:
                raise InvalidInputError("polytope lives in the wrong dimension")
            sub.insert(poly, flag)
            used.extend(poly.constraints)
    tc = sub.export()
    for flag in groups:
        tc.flags.setdefault(flag, [set() for _ in range(b + 1)])
    return ArrangementComplex(tc.b, tc.cells, tc.boundary, tc.flags, hyperplanes=planes + used, cut_count=sub.cuts)
