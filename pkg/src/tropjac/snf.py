"""Integer Smith normal form, sparse invariant factors and integer kernels.

Sparse matrices are column dictionaries ``{col: {row: value}}`` with no
stored zeros.
"""
from __future__ import annotations

from collections import defaultdict
from typing import Mapping, Sequence

SparseCols = Mapping[int, Mapping[int, int]]


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(a: Sequence[Sequence[int]], transforms: bool = True):
    """Return ``(D, U, V)`` with ``U a V = D`` diagonal, d_i | d_{i+1}, d_i >= 0.

    Pivots are chosen of minimal absolute value to limit entry growth.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    A = [list(map(int, row)) for row in a]
    U = _identity(m) if transforms else None
    V = _identity(n) if transforms else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row_dst += k * row_src
        A[dst] = [x + k * y for x, y in zip(A[dst], A[src])]
        if U is not None:
            U[dst] = [x + k * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, k):
        for row in A:
            row[dst] += k * row[src]
        if V is not None:
            for row in V:
                row[dst] += k * row[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            p = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    dirty = dirty or A[i][t] != 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    dirty = dirty or A[t][j] != 0
            if dirty:
                cand = [(abs(A[i][t]), i, t) for i in range(t, m) if A[i][t]]
                cand += [(abs(A[t][j]), t, j) for j in range(t, n) if A[t][j]]
                _, i, j = min(cand)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            if U is not None:
                U[t] = [-x for x in U[t]]
    return A, U, V


def diagonal(d: Sequence[Sequence[int]]) -> list[int]:
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0)) if d[i][i]]


def invariant_factors(cols: SparseCols) -> list[int]:
    """Nonzero invariant factors of a sparse integer matrix.

    Unit pivots are eliminated sparsely (Markowitz-style: shortest column,
    then shortest row); whatever remains is handed to the dense algorithm.
    """
    C: dict[int, dict[int, int]] = {}
    R: dict[int, dict[int, int]] = defaultdict(dict)
    for c, col in cols.items():
        nz = {r: int(v) for r, v in col.items() if v}
        if nz:
            C[c] = nz
            for r, v in nz.items():
                R[r][c] = v
    units = 0
    progress = True
    while progress and C:
        progress = False
        for c in sorted(C, key=lambda c: (len(C[c]), c)):
            col = C.get(c)
            if not col:
                C.pop(c, None)
                continue
            piv = [r for r, v in col.items() if v in (1, -1)]
            if not piv:
                continue
            r = min(piv, key=lambda r: (len(R[r]), r))
            _pivot(C, R, r, c)
            units += 1
            progress = True
    rest_rows = sorted({r for col in C.values() for r in col})
    if not rest_rows:
        return [1] * units
    ridx = {r: i for i, r in enumerate(rest_rows)}
    ccols = sorted(C)
    dense = [[0] * len(ccols) for _ in rest_rows]
    for j, c in enumerate(ccols):
        for r, v in C[c].items():
            dense[ridx[r]][j] = v
    d, _, _ = smith_normal_form(dense, transforms=False)
    return [1] * units + sorted(abs(x) for x in diagonal(d))


def _pivot(C, R, r, c):
    u = C[c][r]
    prow = dict(R[r])
    for r2, a in list(C[c].items()):
        if r2 == r:
            continue
        f = a * u  # u = +-1 so u^-1 = u
        row2 = R[r2]
        for c2, v in prow.items():
            nv = row2.get(c2, 0) - f * v
            if nv:
                row2[c2] = nv
                C[c2][r2] = nv
            else:
                row2.pop(c2, None)
                C[c2].pop(r2, None)
    for c2 in prow:
        C[c2].pop(r, None)
        if not C[c2] and c2 != c:
            del C[c2]
    del R[r]
    C.pop(c, None)


def sparse_rank(cols: SparseCols) -> int:
    return len(invariant_factors(cols))


def integer_kernel(cols: SparseCols, ncols: int) -> list[dict[int, int]]:
    """A Z-basis of {x in Z^ncols : A x = 0}, as sparse vectors.

    Unimodular column reduction with combination tracking; the columns that
    end up zero span the kernel.
    """
    work = {c: ({r: int(v) for r, v in cols.get(c, {}).items() if v}, {c: 1}) for c in range(ncols)}
    kernel = []
    while True:
        for c in [c for c, (vec, _) in work.items() if not vec]:
            kernel.append(work.pop(c)[1])
        if not work:
            break
        # row with the fewest participating columns
        rows: dict[int, list[int]] = defaultdict(list)
        for c, (vec, _) in work.items():
            for r in vec:
                rows[r].append(c)
        r = min(rows, key=lambda r: (len(rows[r]), r))
        members = rows[r]
        while True:
            members = [c for c in members if work[c][0].get(r)]
            p = min(members, key=lambda c: (abs(work[c][0][r]), c))
            others = [c for c in members if c != p]
            if not others:
                break
            pv = work[p][0][r]
            for q in others:
                k = work[q][0][r] // pv
                _axpy(work[q], work[p], -k)
        work.pop(p)
    return sorted(kernel, key=lambda v: sorted(v.items()))


def _axpy(dst, src, k):
    for part in (0, 1):
        d, s = dst[part], src[part]
        for i, v in s.items():
            nv = d.get(i, 0) + k * v
            if nv:
                d[i] = nv
            else:
                d.pop(i, None)


def lattice_summary(rows: Sequence[Sequence[int]], target_dim: int) -> dict:
    """Rank and index data for the column span of an integer matrix in Z^target_dim."""
    if not rows or not rows[0]:
        return {"rank": 0, "invariants": [], "surjective": target_dim == 0}
    d, _, _ = smith_normal_form(rows, transforms=False)
    inv = diagonal(d)
    return {"rank": len(inv), "invariants": inv, "surjective": len(inv) == target_dim and all(x == 1 for x in inv)}


def hermite_columns(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Column-style Hermite basis of the column span (as a list of columns)."""
    if not rows or not rows[0]:
        return []
    m = len(rows)
    cols = [list(c) for c in zip(*rows)]
    basis = []
    for r in range(m):
        live = [c for c in cols if c[r]]
        while len(live) > 1:
            live.sort(key=lambda c: abs(c[r]))
            p = live[0]
            for q in live[1:]:
                k = q[r] // p[r]
                for i in range(m):
                    q[i] -= k * p[i]
            live = [c for c in live if c[r]]
        if live:
            p = live[0]
            if p[r] < 0:
                p[:] = [-x for x in p]
            basis.append(p)
            cols = [c for c in cols if c is not p]
    return basis
