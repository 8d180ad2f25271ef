"""``tropjac`` command line.

Exit codes: 0 success, 1 verification failure (a counterexample dump is
written), 2 invalid input, 3 guard exceeded.
"""
from __future__ import annotations

import argparse
import hashlib
import sys
from dataclasses import replace
from math import comb
from pathlib import Path
from typing import Any, Sequence

from .errors import GuardExceededError, InvalidInputError, TropjacError, VerificationFailure
from .graph import CONVENTION, MetricGraph, jacobian_data
from .guards import Guards, from_env
from .io import dumps, load_graph, read_json, write_off, write_report
from .linalg import qstr

COMMANDS = ("jacobian", "voronoi", "theta", "wd", "lefschetz", "rank", "series", "suite")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tropjac", description="Exact tropical Jacobians, theta skeleta and W_d loci.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--graph", help="graph JSON file")
    p.add_argument("--d", type=int, help="degree / skeleton dimension")
    p.add_argument("--divisor", help="divisor JSON file (rank, series); default: canonical divisor")
    p.add_argument("--suite", help="suite JSON file (suite); default: built-in suite")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--export-off", metavar="DIR", help="write OFF meshes (display only) into DIR")
    p.add_argument("--max-b", type=int, help="override the genus guards")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    p.add_argument("--inject-fault", choices=("sign",), help="corrupt incidence signs to test the harness")
    return p


class _Run:
    def __init__(self, args: argparse.Namespace, guards: Guards):
        self.args = args
        self.guards = guards
        self.graph: MetricGraph | None = None

    def need_graph(self) -> MetricGraph:
        if self.args.graph is None:
            raise InvalidInputError(f"{self.args.command} needs --graph")
        self.graph = load_graph(self.args.graph)
        return self.graph

    def envelope(self, result: Any) -> dict:
        g = self.graph
        env = {
            "command": self.args.command,
            "guards": self.guards.to_json(),
            "seed": self.args.seed,
            "convention": CONVENTION,
            "result": result,
        }
        if g is not None:
            env["input_hash"] = g.digest()
            env["basepoint"] = g.basepoint
        elif self.args.suite:
            env["input_hash"] = hashlib.sha256(Path(self.args.suite).read_bytes()).hexdigest()
        return env


def _need_d(args, default: int | None = None) -> int:
    if args.d is None:
        if default is None:
            raise InvalidInputError(f"{args.command} needs --d")
        return default
    return args.d


def _load_divisor(run: _Run, g: MetricGraph):
    from .divisors import canonical_divisor, divisor_from_json

    if run.args.divisor is None:
        return canonical_divisor(g)
    raw = read_json(run.args.divisor)
    if not isinstance(raw, list):
        raise InvalidInputError("divisor file must hold a JSON list")
    return divisor_from_json(g, raw)


def cmd_jacobian(run: _Run) -> tuple[dict, bool]:
    g = run.need_graph()
    j = jacobian_data(g)
    return {
        "genus": j.genus,
        "gram": [[qstr(x) for x in row] for row in j.gram],
        "cycles": [list(c) for c in j.cycles],
        "edges": [e.id for e in g.edges],
        "velocities": {e.id: [qstr(x) for x in w] for e, w in zip(g.edges, j.velocities)},
        "vertex_images": {v: [qstr(x) for x in p] for v, p in zip(g.vertices, j.vertex_aj)},
    }, True


def cmd_voronoi(run: _Run) -> tuple[dict, bool]:
    from .voronoi import voronoi_cell

    g = run.need_graph()
    j = jacobian_data(g)
    cell = voronoi_cell(j.gram, run.guards)
    if run.args.export_off:
        _off(run, "voronoi.off", [cell.polytope])
    f = cell.f_vector()
    return dict(cell.to_json(), euler=sum((-1) ** k * n for k, n in enumerate(f))), True


def cmd_theta(run: _Run) -> tuple[dict, bool]:
    from .voronoi import theta_skeleton, voronoi_cell

    g = run.need_graph()
    j = jacobian_data(g)
    d = _need_d(run.args, j.genus - 1)
    cell = voronoi_cell(j.gram, run.guards)
    tc = theta_skeleton(cell, d)
    tc.check()
    if run.args.export_off:
        _off(run, f"theta{d}.off", [cell.polytope.face(f) for k in range(d + 1) for f in cell.polytope.faces(k)])
    return {"d": d, "counts": tc.counts(), "homology": tc.homology().to_json(), "euler": tc.euler()}, True


def cmd_wd(run: _Run) -> tuple[dict, bool]:
    from .arrangement import refine
    from .symprod import wd_cells

    g = run.need_graph()
    j = jacobian_data(g)
    d = _need_d(run.args)
    if d < 1:
        raise InvalidInputError("W_d needs d >= 1")
    cells = wd_cells(j, g, d, run.guards)
    out: dict = {"d": d, "cells": [c.to_json(g) for c in cells]}
    ok = True
    if j.genus <= run.guards.max_b_homology:
        tc = refine({"W": [c.polytope for c in cells]}, j.genus, guards=run.guards)
        tc.check()
        h = tc.homology("W")
        out["homology"] = h.to_json()
        expect = [comb(j.genus, i) for i in range(min(d, j.genus) + 1)]
        ok = [h[i].free_rank for i in range(len(expect))] == expect and not any(h[i].torsion for i in range(len(expect)))
        out["matches_torus_skeleton"] = ok
    if run.args.export_off and j.genus <= 3:
        _off(run, f"w{d}.off", [c.polytope for c in cells])
    return out, ok


def cmd_lefschetz(run: _Run) -> tuple[dict, bool]:
    from .lefschetz import lefschetz_check

    g = run.need_graph()
    d = _need_d(run.args)
    if d < 1:
        raise InvalidInputError("the connectivity statement needs d >= 1")
    rep = lefschetz_check(g, d, run.guards)
    return rep.to_json(), rep.passed


def cmd_rank(run: _Run) -> tuple[dict, bool]:
    from .chipfiring import rank_oracle
    from .divisors import rank

    g = run.need_graph()
    j = jacobian_data(g)
    D = _load_divisor(run, g)
    r = rank(j, g, D, run.guards)
    r2 = rank_oracle(g, D.as_dict(), run.guards)
    return {"divisor": D.to_json(), "degree": D.degree, "rank": r, "oracle_rank": r2}, r == r2


def cmd_series(run: _Run) -> tuple[dict, bool]:
    from .series import linear_series

    g = run.need_graph()
    j = jacobian_data(g)
    D = _load_divisor(run, g)
    L = linear_series(j, g, D, run.guards)
    return L.to_json(), L.contractible_shadow


def cmd_suite(run: _Run) -> tuple[dict, bool]:
    from .suite import default_suite, parse_suite, run_suite

    if run.args.suite:
        path = Path(run.args.suite)
        try:
            text = path.read_text()
        except OSError as exc:
            raise InvalidInputError(f"cannot read {path}: {exc.strerror}") from exc
        if not text.strip():
            raise InvalidInputError("suite file is empty")
        spec = parse_suite(read_json(path))
    else:
        spec = default_suite()
    res = run_suite(spec, seed=run.args.seed, guards=run.guards, fault=run.args.inject_fault)
    return res.to_json(), res.passed


HANDLERS = {
    "jacobian": cmd_jacobian,
    "voronoi": cmd_voronoi,
    "theta": cmd_theta,
    "wd": cmd_wd,
    "lefschetz": cmd_lefschetz,
    "rank": cmd_rank,
    "series": cmd_series,
    "suite": cmd_suite,
}


def _off(run: _Run, name: str, polys) -> None:
    out = Path(run.args.export_off)
    out.mkdir(parents=True, exist_ok=True)
    write_off(out / name, polys)


def _dump_counterexample(run: _Run, report: dict) -> Path:
    base = Path(run.args.out) if run.args.out else Path("tropjac-report.json")
    path = base.with_name(base.stem + ".counterexample.json")
    result = report["result"]
    if isinstance(result, dict) and "matrix" in result:
        report = dict(report, result={"failures": [r for r in result["matrix"] if not r["pass"]]})
    path.write_text(dumps(report))
    return path


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    run = None
    try:
        guards = from_env()
        if args.max_b is not None:
            guards = replace(guards, max_b=args.max_b, max_b_homology=args.max_b)
        run = _Run(args, guards)
        if args.inject_fault and args.command != "suite":
            raise InvalidInputError("--inject-fault is only meaningful for the suite")
        result, ok = HANDLERS[args.command](run)
        report = run.envelope(result)
        report["status"] = "PASS" if ok else "FAIL"
        write_report(report, args.out)
        if not ok:
            path = _dump_counterexample(run, report)
            print(f"verification failed; counterexample written to {path}", file=sys.stderr)
            return VerificationFailure.exit_code
        return 0
    except InvalidInputError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    except GuardExceededError as exc:
        print(f"guard exceeded: {exc}", file=sys.stderr)
        return 3
    except (TropjacError, ArithmeticError) as exc:
        msg = f"verification error: {exc}"
        if run is not None:
            cells = getattr(exc, "cells", [])
            report = run.envelope({"error": type(exc).__name__, "message": str(exc), "cells": [list(c) for c in cells]})
            msg += f"; counterexample written to {_dump_counterexample(run, report)}"
        print(msg, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
