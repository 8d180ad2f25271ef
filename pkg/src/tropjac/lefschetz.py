"""Connectivity of the pair (J, W_d), checked through cellular homology."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from gmpy2 import mpq

from .arrangement import ArrangementComplex, refine
from .complex import HomologyResult, TorusCellComplex
from .errors import InvalidInputError
from .graph import MetricGraph, jacobian_data
from .guards import DEFAULT, Guards
from .snf import hermite_columns, integer_kernel, lattice_summary

CERTIFIED = "homology groups over Z and pi_1 via H_1 of the torus; higher homotopy is not certified"


@dataclass
class InducedMap:
    k: int
    source_rank: int  # Betti number of the subcomplex
    source_torsion: tuple
    target_rank: int
    matrix: list[list[int]]  # on free bases, columns = source basis
    image_rank: int
    image_invariants: list[int]

    @property
    def injective(self) -> bool:
        return not self.source_torsion and self.image_rank == self.source_rank

    @property
    def surjective(self) -> bool:
        return self.image_rank == self.target_rank and all(x == 1 for x in self.image_invariants)

    @property
    def isomorphism(self) -> bool:
        return self.injective and self.surjective

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "matrix": self.matrix,
            "image_rank": self.image_rank,
            "image_invariants": self.image_invariants,
            "injective": self.injective,
            "surjective": self.surjective,
        }


def induced_map(tc: TorusCellComplex, flag: str, k: int, sub_homology: HomologyResult | None = None) -> InducedMap:
    """H_k(flagged subcomplex) -> H_k(T^b) = Lambda^k Z^b.

    Cycles are evaluated on the invariant forms dx_I, which vanish on
    boundaries; the image lattice is the span of the values on a Z-basis of
    the cycle group.
    """
    b = tc.b
    sub_homology = sub_homology or tc.homology(flag)
    cc = tc.chain_complex(flag)
    sel = sorted(tc.flags[flag][k]) if k <= tc.top else []
    target = comb(b, k)
    cycles = integer_kernel(cc.d(k), len(sel)) if sel else []
    cols = []
    cache = {}
    for z in cycles:
        acc = [0] * target
        for local, coeff in z.items():
            i = sel[local]
            if i not in cache:
                cache[i] = tc.integration(k, i)
            for t, v in enumerate(cache[i]):
                acc[t] += coeff * v
        if any(x.denominator != 1 for x in map(mpq, acc)):
            raise ArithmeticError("period of an integral cycle is not an integer")
        cols.append([int(x) for x in acc])
    rows = [list(r) for r in zip(*cols)] if cols else []
    summary = lattice_summary(rows, target)
    hnf = hermite_columns(rows)
    beta = sub_homology[k].free_rank
    matrix = [[c[r] for c in hnf] + [0] * (beta - len(hnf)) for r in range(target)]
    return InducedMap(k, beta, sub_homology[k].torsion, target, matrix, summary["rank"], summary["invariants"])


def les_consistent(total: HomologyResult, sub: HomologyResult, pair: HomologyResult, maps: dict[int, InducedMap], top: int) -> bool:
    """Rank bookkeeping of the long exact sequence over Q, degree by degree:
    rank H_i(pair) = (b_i(total) - rho_i) + (b_{i-1}(sub) - rho_{i-1})."""
    for i in range(top + 1):
        rho = maps[i].image_rank if i in maps else None
        rho_prev = maps[i - 1].image_rank if i - 1 in maps else 0
        if rho is None:
            continue
        expect = (total[i].free_rank - rho) + (sub[i - 1].free_rank - rho_prev if i > 0 else 0)
        if pair[i].free_rank != expect:
            return False
    return True


@dataclass
class ConnectivityReport:
    b: int
    d: int
    passed: bool
    relative: HomologyResult
    total: HomologyResult
    sub: HomologyResult
    maps: dict[int, InducedMap]
    counts: list[int]
    sub_counts: list[int]
    wd_cells: int
    les_ok: bool
    shadow_ok: bool
    verdicts: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "b": self.b,
            "d": self.d,
            "verdict": "PASS" if self.passed else "FAIL",
            "relative_homology": self.relative.to_json(),
            "total_homology": self.total.to_json(),
            "wd_homology": self.sub.to_json(),
            "induced_maps": [self.maps[k].to_json() for k in sorted(self.maps)],
            "cell_counts": self.counts,
            "wd_cell_counts": self.sub_counts,
            "wd_zonotopes": self.wd_cells,
            "long_exact_sequence_consistent": self.les_ok,
            "wd_homology_matches_torus_skeleton": self.shadow_ok,
            "per_dimension": self.verdicts,
            "certified": CERTIFIED,
        }


def pair_complex(g: MetricGraph, d: int, guards: Guards = DEFAULT) -> ArrangementComplex:
    from .symprod import wd_polytopes

    j = jacobian_data(g)
    guards.check("max_b_homology", j.genus)
    return refine({"W": wd_polytopes(j, g, d, guards)}, j.genus, guards=guards)


def lefschetz_check(g: MetricGraph, d: int, guards: Guards = DEFAULT) -> ConnectivityReport:
    """PASS iff H_i(J, W_d) = 0 for i <= d and H_1(W_d) -> H_1(J) is onto,
    and an isomorphism once d >= 2."""
    from .symprod import wd_cells

    if d < 1:
        raise InvalidInputError("the connectivity statement needs d >= 1")
    j = jacobian_data(g)
    b = j.genus
    guards.check("max_b_homology", b)
    guards.check("max_d", d)
    cells = wd_cells(j, g, d, guards)
    tc = refine({"W": [c.polytope for c in cells]}, b, guards=guards)
    tc.check()
    if tc.euler() != 0:
        raise ArithmeticError("torus subdivision has nonzero Euler characteristic")
    total = tc.homology()
    sub = tc.homology("W")
    rel = tc.relative_homology("W")
    top = min(d, b)
    maps = {k: induced_map(tc, "W", k, sub) for k in range(top + 1)}
    les_ok = les_consistent(total, sub, rel, maps, top)
    shadow_ok = all(sub[i].free_rank == comb(b, i) and not sub[i].torsion for i in range(top + 1))
    verdicts = [{"dim": i, "relative_vanishes": rel[i].is_zero} for i in range(top + 1)]
    h1 = maps.get(1)
    h1_ok = h1 is None or (h1.isomorphism if d >= 2 else h1.surjective)
    passed = all(v["relative_vanishes"] for v in verdicts) and h1_ok and les_ok
    return ConnectivityReport(b, d, passed, rel, total, sub, maps, tc.counts(), tc.counts("W"), len(cells), les_ok, shadow_ok, verdicts)
