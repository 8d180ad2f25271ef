"""File formats: graph and divisor JSON, deterministic reports, OFF export."""
from __future__ import annotations

import json
from decimal import Decimal, localcontext
from pathlib import Path
from typing import Any, Iterable, Sequence

from gmpy2 import mpq

from .errors import InvalidInputError
from .graph import MetricGraph, validate_graph
from .polytope import Polytope

OFF_PRECISION = 12


def read_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path} is not valid JSON: {exc.msg}") from exc


def load_graph(path: str | Path) -> MetricGraph:
    raw = read_json(path)
    if not isinstance(raw, dict):
        raise InvalidInputError("graph file must hold a JSON object")
    return validate_graph(raw)


def dumps(report: Any) -> str:
    """Canonical serialization: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def write_report(report: Any, out: str | Path | None) -> str:
    text = dumps(report)
    if out is None:
        print(text, end="")
    else:
        Path(out).write_text(text)
    return text


# -- OFF ---------------------------------------------------------------------------

def decimal_str(x, precision: int = OFF_PRECISION) -> str:
    """Display-only decimal rendering of an exact rational."""
    x = mpq(x)
    with localcontext() as ctx:
        ctx.prec = precision
        d = Decimal(int(x.numerator)) / Decimal(int(x.denominator))
    s = format(d, "f")
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _polygon_cycle(p: Polytope, face: frozenset) -> list[int]:
    """Vertex indices of a 2-face in cyclic order, walking its edges."""
    edges = [tuple(sorted(e)) for e in p.faces(1) if e <= face]
    adj: dict[int, list[int]] = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    start = min(face)
    cycle, prev, cur = [start], None, start
    while True:
        nxt = min(adj[cur]) if prev is None else next(w for w in adj[cur] if w != prev)
        if nxt == start:
            break
        cycle.append(nxt)
        prev, cur = cur, nxt
    return cycle


def off_text(polys: Iterable[Polytope], precision: int = OFF_PRECISION) -> str:
    """OFF mesh of the given polytopes (ambient dimension at most 3).

    Two-dimensional faces become polygons; edges and points of lower
    dimensional polytopes are written as degenerate faces.
    """
    verts: list[tuple] = []
    vidx: dict[tuple, int] = {}
    faces: list[list[int]] = []

    def vid(p: Sequence) -> int:
        key = tuple(p) + (mpq(0),) * (3 - len(p))
        if key not in vidx:
            vidx[key] = len(verts)
            verts.append(key)
        return vidx[key]

    for P in polys:
        if P.ambient > 3:
            raise InvalidInputError("OFF export needs ambient dimension <= 3")
        if P.dim == 0:
            faces.append([vid(P.vertices[0])])
        elif P.dim == 1:
            faces.append([vid(v) for v in P.vertices])
        else:
            for f in P.faces(2):
                faces.append([vid(P.vertices[i]) for i in _polygon_cycle(P, f)])
    lines = ["OFF", f"{len(verts)} {len(faces)} 0"]
    lines += [" ".join(decimal_str(x, precision) for x in v) for v in verts]
    lines += [" ".join([str(len(f))] + [str(i) for i in f]) for f in faces]
    return "\n".join(lines) + "\n"


def write_off(path: str | Path, polys: Iterable[Polytope], precision: int = OFF_PRECISION) -> None:
    Path(path).write_text(off_text(polys, precision))
