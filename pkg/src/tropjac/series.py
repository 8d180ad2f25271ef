"""Complete linear series |D| as a polyhedral complex.

For a cell of Sym^d (edge multiset) and a lattice vector lam, the effective
divisors of the cell mapping to y = mu(D) form the polytope

    0 <= t_{e,1} <= ... <= t_{e,m_e} <= len(e),   sum_e (sum_j t_{e,j}) w_e = y - c + lam

in ordered offset space.  A face of such a polytope lies in one open stratum
of Sym^d: which offsets sit at a vertex, and how the interior offsets on each
edge group together.  Faces are glued across cells by this stratum label plus
the positions of the groups, which are honest coordinates on the stratum.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from .complex import ChainComplex, HomologyResult, homology, orientation_basis
from .divisors import Divisor, aj_lift, is_effective_class
from .errors import InvalidInputError
from .graph import JacobianData, MetricGraph
from .guards import DEFAULT, Guards
from .linalg import Chart, centroid, det, sign, sub, unit
from .polytope import Polytope, lattice_shifts
from .symprod import SymCell, aj_on_cell, sym_cells, zonotope


@dataclass(frozen=True)
class _Layout:
    """Which ordered coordinate belongs to which edge."""

    cell: SymCell
    slots: tuple[tuple[int, int, int], ...]  # (edge index, start, multiplicity)

    @classmethod
    def of(cls, cell: SymCell) -> "_Layout":
        slots, pos = [], 0
        for i, m in cell.mult:
            slots.append((i, pos, m))
            pos += m
        return cls(cell, tuple(slots))


def _fiber(g: MetricGraph, lay: _Layout, vel, target) -> Polytope | None:
    d = lay.cell.dim
    ineqs = []
    for i, start, m in lay.slots:
        ln = g.edges[i].length
        ineqs.append((tuple(-x for x in unit(d, start)), mpq(0)))
        for k in range(start, start + m - 1):
            ineqs.append((sub(unit(d, k), unit(d, k + 1)), mpq(0)))
        ineqs.append((unit(d, start + m - 1), ln))
    b = len(target)
    eqs = []
    for r in range(b):
        row = [mpq(0)] * d
        for i, start, m in lay.slots:
            for k in range(start, start + m):
                row[k] = vel[i][r]
        eqs.append((tuple(row), target[r]))
    eqs = [(a, beta) for a, beta in eqs if any(a) or beta]
    if any(not any(a) for a, _ in eqs):
        return None  # 0 = nonzero
    return Polytope.from_hrep(ineqs, eqs, ambient=d)


def _stratum(g: MetricGraph, lay: _Layout, t: Sequence) -> tuple[tuple, list[list[int]]]:
    """Stratum label of an ordered offset vector and, per interior group,
    the coordinates that realize it."""
    verts = []
    comps = []
    groups: list[list[int]] = []
    for i, start, m in lay.slots:
        e = g.edges[i]
        sizes = []
        prev = None
        for k in range(start, start + m):
            x = t[k]
            if x == 0:
                verts.append(e.tail)
            elif x == e.length:
                verts.append(e.head)
            elif prev is not None and x == prev:
                sizes[-1] += 1
                groups[-1].append(k)
            else:
                sizes.append(1)
                groups.append([k])
            prev = x if 0 < x < e.length else None
        if sizes:
            comps.append((e.id, tuple(sizes)))
    return (tuple(sorted(verts)), tuple(comps)), groups


@dataclass
class LinearSeriesComplex:
    divisor: Divisor
    cells: list[list[tuple]]  # per dimension: (label, key vertex tuple)
    chain: ChainComplex
    homology: HomologyResult

    @property
    def counts(self) -> list[int]:
        return [len(c) for c in self.cells]

    @property
    def contractible_shadow(self) -> bool:
        red = self.homology.reduced()
        return all(g.is_zero for g in red.groups)

    def to_json(self) -> dict:
        return {
            "divisor": self.divisor.to_json(),
            "cell_counts": self.counts,
            "homology": self.homology.to_json(),
            "reduced_homology_vanishes": self.contractible_shadow,
        }


def linear_series(j: JacobianData, g: MetricGraph, D: Divisor, guards: Guards = DEFAULT) -> LinearSeriesComplex:
    d = D.degree
    if d < 1:
        raise InvalidInputError("linear series needs degree >= 1")
    guards.check("max_d", d)
    y = aj_lift(j, g, D)
    if not is_effective_class(j, g, y, d, guards):
        raise InvalidInputError("|D| is empty: D is not equivalent to an effective divisor")
    faces: dict[tuple, tuple] = {}  # key -> (dim, fiber polytope, layout, face)
    for sc in sym_cells(g, d, guards):
        lay = _Layout.of(sc)
        amap = aj_on_cell(j, g, sc)
        z = zonotope(amap.base, amap.generators)
        for lam in lattice_shifts(z.bbox, (y, y)):
            target = tuple(yi - ci - li for yi, ci, li in zip(y, amap.base, lam))
            P = _fiber(g, lay, j.velocities, target)
            if P is None:
                continue
            for k, flist in P.face_lattice.items():
                for f in flist:
                    key, _ = _face_key(g, lay, P, f)
                    faces.setdefault(key, (k, P, lay, f))
    top = max(k for k, *_ in faces.values())
    cells = [sorted(key for key, rec in faces.items() if rec[0] == n) for n in range(top + 1)]
    index = [{key: i for i, key in enumerate(cs)} for cs in cells]
    boundary: list[dict[int, dict[int, int]]] = [{} for _ in range(top + 1)]
    for key, (k, P, lay, f) in faces.items():
        if k == 0:
            continue
        _, basis_f = _face_key(g, lay, P, f)
        chart = Chart(basis_f)
        ft = [P.vertices[i] for i in sorted(f)]
        chain: dict[int, int] = {}
        for h in P.faces(k - 1):
            if not h <= f:
                continue
            hkey, basis_h = _face_key(g, lay, P, h)
            out = sub(centroid([P.vertices[i] for i in sorted(h)]), centroid(ft))
            s = sign(det([chart.coords(v) for v in [out] + basis_h]))
            if s == 0:
                raise ArithmeticError("degenerate incidence in linear series")
            jj = index[k - 1][hkey]
            chain[jj] = chain.get(jj, 0) + s
        boundary[k][index[k][key]] = {a: v for a, v in chain.items() if v}
    cc = ChainComplex([len(c) for c in cells], boundary)
    cc.check()
    return LinearSeriesComplex(D, cells, cc, homology(cc))


def _face_key(g: MetricGraph, lay: _Layout, P: Polytope, f) -> tuple[tuple, list[tuple]]:
    """Gluing key of a face and its orientation basis pulled back to offset space.

    The key is the stratum label with the group positions of the face's
    vertices; the orientation is the lexicographic one in group coordinates.
    """
    vt = [P.vertices[i] for i in sorted(f)]
    label, groups = _stratum(g, lay, centroid(vt))
    kv = sorted(tuple(v[grp[0]] for grp in groups) for v in vt)
    n = len(vt[0])
    basis = []
    for dx in orientation_basis(kv) if len(kv) > 1 else []:
        dt = [mpq(0)] * n
        for x, grp in zip(dx, groups):
            for k in grp:
                dt[k] = x
        basis.append(tuple(dt))
    return (label, tuple(kv)), basis
