"""Exact rational linear algebra on tuples of ``mpq``.

Vectors are plain tuples and matrices are lists of row tuples.  Nothing in
here ever touches a float.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from gmpy2 import mpq

Vec = tuple
ZERO = mpq(0)
ONE = mpq(1)


def Q(x) -> mpq:
    """Coerce ``x`` to an exact rational.

    Accepts ints, ``Fraction``, ``mpq`` and strings like ``"3/4"`` or ``"2"``.
    Floats are rejected: an edge length of ``0.1`` is not the rational 1/10.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, type(ZERO))):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        s = x.strip()
        if not s or any(ch in s for ch in ".eE"):
            raise ValueError(f"not an exact rational: {x!r}")
        try:
            return mpq(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact rational: {x!r}") from exc
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def qstr(x) -> str:
    return str(mpq(x))


def vec(xs: Iterable) -> tuple:
    return tuple(Q(x) for x in xs)


def zeros(n: int) -> tuple:
    return (ZERO,) * n


def unit(n: int, i: int) -> tuple:
    return tuple(ONE if j == i else ZERO for j in range(n))


def add(a: Sequence, b: Sequence) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Sequence, b: Sequence) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def scale(c, a: Sequence) -> tuple:
    return tuple(c * x for x in a)


def dot(a: Sequence, b: Sequence):
    s = ZERO
    for x, y in zip(a, b):
        if x and y:
            s += x * y
    return s


def matvec(m: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(dot(row, v) for row in m)


def transpose(m: Sequence[Sequence]) -> list:
    return [tuple(col) for col in zip(*m)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list:
    bt = transpose(b)
    return [tuple(dot(row, col) for col in bt) for row in a]


def centroid(points: Sequence[Sequence]) -> tuple:
    n = len(points)
    acc = [ZERO] * len(points[0])
    for p in points:
        for i, x in enumerate(p):
            acc[i] += x
    return tuple(x / n for x in acc)


def floor_vec(v: Sequence) -> tuple:
    return tuple(int(x.__floor__()) for x in map(mpq, v))


def frac_vec(v: Sequence) -> tuple:
    """Canonical representative of ``v`` modulo the integer lattice, in [0,1)^n."""
    return tuple(x - x.__floor__() for x in map(mpq, v))


def is_integral(v: Sequence) -> bool:
    return all(mpq(x).denominator == 1 for x in v)


def rref(rows: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [[mpq(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1]) if rows else 0


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[tuple]:
    """Basis of {x : rows @ x = 0}, one vector per free column."""
    if not rows:
        return [unit(ncols, i) for i in range(ncols)]
    red, piv = rref(rows)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = [ZERO] * ncols
        x[f] = ONE
        for r, pc in enumerate(piv):
            x[pc] = -red[r][f]
        basis.append(tuple(x))
    return basis


def solve(a: Sequence[Sequence], b: Sequence) -> tuple | None:
    """Solve ``a x = b``; returns one solution (free variables 0) or None."""
    n = len(a[0]) if a else 0
    aug = [list(r) + [y] for r, y in zip(a, b)]
    red, piv = rref(aug)
    if n in piv:
        return None
    x = [ZERO] * n
    for r, pc in enumerate(piv):
        x[pc] = red[r][n]
    return tuple(x)


def det(m: Sequence[Sequence]):
    a = [[mpq(x) for x in r] for r in m]
    n = len(a)
    d = ONE
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c]), None)
        if p is None:
            return ZERO
        if p != c:
            a[c], a[p] = a[p], a[c]
            d = -d
        d *= a[c][c]
        inv = 1 / a[c][c]
        for i in range(c + 1, n):
            if a[i][c]:
                f = a[i][c] * inv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return d


def inverse(m: Sequence[Sequence]) -> list[tuple]:
    n = len(m)
    aug = [list(r) + list(unit(n, i)) for i, r in enumerate(m)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [tuple(r[n:]) for r in red]


def leading_minors(m: Sequence[Sequence]) -> list:
    return [det([row[:k] for row in m[:k]]) for k in range(1, len(m) + 1)]


def primitive(v: Sequence) -> tuple[tuple[int, ...], mpq]:
    """Scale a nonzero rational vector to a primitive integer vector.

    Returns ``(w, c)`` with ``w = c * v`` and ``c > 0``.
    """
    v = [mpq(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("zero vector has no primitive scaling")
    return tuple(x // g for x in ints), mpq(den, g)


def affine_rank(points: Sequence[Sequence]) -> int:
    if len(points) <= 1:
        return 0
    p0 = points[0]
    return rank([sub(p, p0) for p in points[1:]])


def direction_basis(points: Sequence[Sequence]) -> list[tuple]:
    """Greedy orientation basis: differences from the lexicographically first
    point to later points, kept whenever they raise the rank."""
    pts = sorted(points)
    p0 = pts[0]
    basis: list[tuple] = []
    for p in pts[1:]:
        d = sub(p, p0)
        if rank(basis + [d]) > len(basis):
            basis.append(d)
    return basis


class Chart:
    """Coordinates of vectors in a fixed (possibly non-spanning) basis.

    ``coords(v)`` solves ``B c = v`` for a vector ``v`` in the span of the
    basis columns, using a fixed set of pivot rows.
    """

    __slots__ = ("basis", "rows", "inv")

    def __init__(self, basis: Sequence[Sequence]):
        self.basis = [tuple(b) for b in basis]
        k = len(self.basis)
        if k == 0:
            self.rows, self.inv = [], []
            return
        cols = transpose(self.basis)  # ambient x k
        _, piv = rref(transpose(cols))  # pivots of B^T = independent rows of B
        self.rows = piv
        sq = [cols[r] for r in piv]
        self.inv = inverse(sq)

    def coords(self, v: Sequence) -> tuple:
        return matvec(self.inv, [v[r] for r in self.rows])


def sign(x) -> int:
    return (x > 0) - (x < 0)
