"""Divisors on metric graphs: div(f), equivalence, effectivity and rank."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .errors import InvalidInputError
from .graph import GraphPoint, JacobianData, MetricGraph, TorusPoint, lift_point
from .guards import DEFAULT, Guards
from .linalg import Q, add, scale, sub, zeros
from .polytope import Polytope, covered, point_in_union


@dataclass(frozen=True)
class Divisor:
    """Finitely supported integer combination of canonical graph points."""

    coeffs: tuple[tuple[GraphPoint, int], ...]

    @classmethod
    def of(cls, items: Mapping[GraphPoint, int] | Iterable[tuple[GraphPoint, int]]) -> "Divisor":
        acc: dict[GraphPoint, int] = {}
        pairs = items.items() if isinstance(items, Mapping) else items
        for p, c in pairs:
            if not isinstance(c, int) or isinstance(c, bool):
                raise InvalidInputError(f"divisor coefficient {c!r} is not an integer")
            acc[p] = acc.get(p, 0) + c
        return cls(tuple(sorted(((p, c) for p, c in acc.items() if c), key=lambda pc: pc[0].sort_key())))

    @classmethod
    def zero(cls) -> "Divisor":
        return cls(())

    @property
    def degree(self) -> int:
        return sum(c for _, c in self.coeffs)

    def as_dict(self) -> dict[GraphPoint, int]:
        return dict(self.coeffs)

    @property
    def is_effective(self) -> bool:
        return all(c > 0 for _, c in self.coeffs)

    def __add__(self, other: "Divisor") -> "Divisor":
        return Divisor.of(list(self.coeffs) + list(other.coeffs))

    def __neg__(self) -> "Divisor":
        return Divisor(tuple((p, -c) for p, c in self.coeffs))

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def to_json(self) -> list[dict]:
        return [dict(p.to_json(), coeff=c) for p, c in self.coeffs]

    def __str__(self) -> str:
        return " + ".join(f"{c}*{p}" for p, c in self.coeffs) or "0"


def divisor_from_json(g: MetricGraph, items: Sequence[Mapping]) -> Divisor:
    pts = []
    for it in items:
        try:
            c = it["coeff"]
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"divisor entry {it!r} needs a coeff") from exc
        if not isinstance(c, int) or isinstance(c, bool):
            raise InvalidInputError(f"divisor coefficient {c!r} is not an integer")
        if "vertex" in it:
            p = g.vertex_point(str(it["vertex"]))
        elif "edge" in it:
            try:
                off = Q(it.get("offset", 0))
            except (TypeError, ValueError) as exc:
                raise InvalidInputError(f"offset in {it!r} is not an exact rational") from exc
            p = g.point(str(it["edge"]), off)
        else:
            raise InvalidInputError(f"divisor entry {it!r} needs a vertex or an edge")
        pts.append((p, c))
    return Divisor.of(pts)


def canonical_divisor(g: MetricGraph) -> Divisor:
    """K = sum (val(v) - 2) v on the working model."""
    return Divisor.of([(g.vertex_point(v), len(g.incident[v]) - 2) for v in g.vertices])


# -- piecewise linear functions ---------------------------------------------

@dataclass(frozen=True)
class EdgePiece:
    breaks: tuple[mpq, ...]  # 0 = x_0 < x_1 < ... < x_n = len(e)
    slopes: tuple[int, ...]  # one per segment, measured tail -> head


@dataclass(frozen=True)
class PLFunction:
    """Continuous piecewise linear function with integer slopes."""

    values: tuple[tuple[str, mpq], ...]  # vertex values
    pieces: tuple[EdgePiece, ...]  # one per edge, in edge order

    def check(self, g: MetricGraph) -> None:
        vals = dict(self.values)
        if len(self.pieces) != len(g.edges):
            raise InvalidInputError("one piece per edge required")
        for e, pc in zip(g.edges, self.pieces):
            if any(not isinstance(s, int) for s in pc.slopes):
                raise InvalidInputError("slopes must be integers")
            if pc.breaks[0] != 0 or pc.breaks[-1] != e.length or len(pc.slopes) != len(pc.breaks) - 1:
                raise InvalidInputError(f"bad breakpoints on edge {e.id}")
            if any(a >= b for a, b in zip(pc.breaks, pc.breaks[1:])):
                raise InvalidInputError(f"breakpoints on edge {e.id} are not increasing")
            rise = sum((s * (b - a) for s, a, b in zip(pc.slopes, pc.breaks, pc.breaks[1:])), mpq(0))
            if vals[e.tail] + rise != vals[e.head]:
                raise InvalidInputError(f"function is discontinuous along edge {e.id}")

    def __call__(self, g: MetricGraph, x: GraphPoint) -> mpq:
        vals = dict(self.values)
        if x.vertex is not None:
            return vals[x.vertex]
        i = g.edge_index[x.edge]
        pc = self.pieces[i]
        y = vals[g.edges[i].tail]
        for s, a, b in zip(pc.slopes, pc.breaks, pc.breaks[1:]):
            if x.offset <= a:
                break
            y += s * (min(b, x.offset) - a)
        return y


def div_of(g: MetricGraph, f: PLFunction) -> Divisor:
    """ord_x(f) = sum of outgoing slopes at x."""
    f.check(g)
    acc: dict[GraphPoint, int] = {}
    for e, pc in zip(g.edges, f.pieces):
        t = g.vertex_point(e.tail)
        h = g.vertex_point(e.head)
        acc[t] = acc.get(t, 0) + pc.slopes[0]
        acc[h] = acc.get(h, 0) - pc.slopes[-1]
        for k in range(1, len(pc.slopes)):
            p = GraphPoint(None, e.id, pc.breaks[k])
            acc[p] = acc.get(p, 0) + pc.slopes[k] - pc.slopes[k - 1]
    return Divisor.of(acc)


def _split_length(rng: random.Random, length: mpq, rise: mpq, extra: int, den: int) -> tuple[list[mpq], list[int]]:
    """Integer slopes and segment lengths with the prescribed total rise."""
    avg = rise / length
    if avg.denominator == 1 and extra == 0:
        return [length], [int(avg)]
    lo = int(avg.__floor__()) - rng.randint(0, 2)
    hi = int(avg.__ceil__()) + rng.randint(0, 2)
    if lo == hi:
        hi += 1
    # short middle segments with slopes in [lo, hi]; the outer two absorb the rest
    mids = [rng.randint(lo, hi) for _ in range(extra)]
    eps = length / (4 * (extra + 1))
    mid_len = [eps * mpq(rng.randint(1, den), den) for _ in mids]
    rest_len = length - sum(mid_len, mpq(0))
    rest_rise = rise - sum((s * l for s, l in zip(mids, mid_len)), mpq(0))
    a = (hi * rest_len - rest_rise) / (hi - lo)  # lo * a + hi * (rest_len - a) = rest_rise
    if not 0 <= a <= rest_len:
        # the middle pieces overshot; without them the average lies in [lo, hi]
        mids, mid_len, rest_len = [], [], length
        a = (hi * length - rise) / (hi - lo)
    segs = [(lo, a), (hi, rest_len - a)] + list(zip(mids, mid_len))
    rng.shuffle(segs)
    segs = [(s, l) for s, l in segs if l > 0]
    return [l for _, l in segs], [s for s, _ in segs]


def random_pl_function(g: MetricGraph, rng: random.Random, max_breaks: int = 2, den: int = 4) -> PLFunction:
    """Random continuous PL function with integer slopes and rational breaks."""
    vals = {v: mpq(rng.randint(-3 * den, 3 * den), den) for v in g.vertices}
    pieces = []
    for e in g.edges:
        rise = vals[e.head] - vals[e.tail]
        lens, slopes = _split_length(rng, e.length, rise, rng.randint(0, max_breaks), den)
        breaks = [mpq(0)]
        for l in lens:
            breaks.append(breaks[-1] + l)
        assert breaks[-1] == e.length
        pieces.append(EdgePiece(tuple(breaks), tuple(slopes)))
    f = PLFunction(tuple(sorted(vals.items())), tuple(pieces))
    f.check(g)
    return f


def constant_function(g: MetricGraph, c=0) -> PLFunction:
    return PLFunction(
        tuple((v, Q(c)) for v in sorted(g.vertices)),
        tuple(EdgePiece((mpq(0), e.length), (0,)) for e in g.edges),
    )


# -- Abel-Jacobi and equivalence -------------------------------------------------

def aj_lift(j: JacobianData, g: MetricGraph, D: Divisor) -> tuple:
    x = zeros(j.genus)
    for p, c in D.coeffs:
        x = add(x, scale(c, lift_point(j, g, p)))
    return x


def aj_divisor(j: JacobianData, g: MetricGraph, D: Divisor) -> TorusPoint:
    return TorusPoint.of(aj_lift(j, g, D))


def is_equivalent(j: JacobianData, g: MetricGraph, D: Divisor, E: Divisor) -> bool:
    """Decided through the bijection Pic^d -> J: same degree and same image."""
    return D.degree == E.degree and aj_divisor(j, g, D) == aj_divisor(j, g, E)


def is_effective_class(j: JacobianData, g: MetricGraph, y, d: int, guards: Guards = DEFAULT) -> bool:
    """Is the point y of the torus in W_d?"""
    from .symprod import wd_polytopes

    if d < 0:
        raise InvalidInputError("degree must be nonnegative")
    y = y.coords if isinstance(y, TorusPoint) else tuple(Q(x) for x in y)
    if d == 0:
        return TorusPoint.of(y).is_zero
    if d >= j.genus:
        return True
    return point_in_union(y, wd_polytopes(j, g, d, guards))


def _contained_after_negation(y, polys_k: list[Polytope], polys_rest: list[Polytope]) -> bool:
    """Is y - (union of polys_k) inside the union polys_rest (mod Z^b)?"""
    for p in polys_k:
        piece = Polytope.from_points([sub(y, v) for v in p.vertices])
        if not covered(piece, polys_rest):
            return False
    return True


def rank(j: JacobianData, g: MetricGraph, D: Divisor, guards: Guards = DEFAULT) -> int:
    """Largest r with y - W_r contained in W_{d-r}, where y is the image of D."""
    from .symprod import wd_polytopes

    d = D.degree
    b = j.genus
    if d < 0:
        return -1
    y = aj_lift(j, g, D)
    if not is_effective_class(j, g, y, d, guards):
        return -1
    r = 0
    for k in range(1, d + 1):
        rest = d - k
        if rest >= b:
            ok = True
        elif k >= b:
            ok = False  # W_k is everything but W_rest is not
        else:
            guards.check("containment_dim", b)
            polys_rest = [Polytope.from_points([zeros(b)])] if rest == 0 else wd_polytopes(j, g, rest, guards)
            ok = _contained_after_negation(y, wd_polytopes(j, g, k, guards), polys_rest)
        if not ok:
            break
        r = k
    return r


def random_divisor(g: MetricGraph, rng: random.Random, degree: int, effective: bool = True, den: int = 2) -> Divisor:
    """Random divisor with points on the grid of step len/den along each edge."""
    neg = 0 if effective else rng.randint(0, 2)
    pos = degree + neg
    if pos < 0:
        raise InvalidInputError("degree too negative for the requested shape")

    def pick() -> GraphPoint:
        e = g.edges[rng.randrange(len(g.edges))]
        return g.point(e.id, e.length * rng.randint(0, den) / den)

    return Divisor.of([(pick(), 1) for _ in range(pos)] + [(pick(), -1) for _ in range(neg)])
