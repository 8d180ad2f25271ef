"""The verification suite: every check as a named pass/fail record."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import comb
from typing import Any, Callable, Mapping

from gmpy2 import mpq

from . import catalog
from .chipfiring import oracle_effective, rank_oracle
from .complex import inject_fault
from .divisors import aj_lift, canonical_divisor, is_effective_class, random_divisor, rank
from .errors import InvalidInputError, TropjacError
from .graph import MetricGraph, bouquet, circle, complete_graph_k4, dumbbell, jacobian_data, theta_graph, validate_graph
from .guards import DEFAULT, Guards
from .lefschetz import lefschetz_check
from .linalg import qstr
from .series import linear_series
from .symprod import wd_polytopes
from .voronoi import PolytopeUnion, theta_skeleton, translate_match, voronoi_cell, voronoi_torus

ALL_CHECKS = ("voronoi", "theta", "translate", "lefschetz", "rank", "series")

FAMILIES: dict[str, Callable[..., MetricGraph]] = {
    "bouquet": lambda lengths=("1", "1"): bouquet(lengths),
    "theta": lambda lengths=("1", "1", "1"): theta_graph(lengths),
    "circle": lambda length="1": circle(length),
    "dumbbell": lambda l1="1", bridge="1", l2="1": dumbbell(l1, bridge, l2),
    "k4": lambda lengths=None: complete_graph_k4(lengths),
    "twin": lambda lengths=None: catalog.twin_edge_graph(lengths),
}


@dataclass
class SuiteSpec:
    graphs: dict[str, MetricGraph]
    checks: tuple[str, ...] = ALL_CHECKS
    samples: int = 4


def default_suite() -> SuiteSpec:
    return SuiteSpec(catalog.suite_graphs())


def parse_suite(raw: Any) -> SuiteSpec:
    """Suite file: {"graphs": [{"name", "family", "args"} | {"name", "graph"}], "checks", "samples"}."""
    if not isinstance(raw, Mapping) or not raw.get("graphs"):
        raise InvalidInputError("suite file lists no graphs")
    graphs = {}
    for k, item in enumerate(raw["graphs"]):
        if not isinstance(item, Mapping):
            raise InvalidInputError(f"suite entry {k} is not an object")
        name = str(item.get("name", f"graph{k}"))
        if "graph" in item:
            graphs[name] = validate_graph(item["graph"])
        elif item.get("family") in FAMILIES:
            args = item.get("args", {})
            if not isinstance(args, Mapping):
                raise InvalidInputError(f"suite entry {name!r}: args must be an object")
            graphs[name] = FAMILIES[item["family"]](**args)
        else:
            raise InvalidInputError(f"suite entry {name!r} needs a graph or a known family")
    checks = tuple(raw.get("checks", ALL_CHECKS))
    unknown = set(checks) - set(ALL_CHECKS)
    if unknown:
        raise InvalidInputError(f"unknown checks {sorted(unknown)}")
    samples = raw.get("samples", 4)
    if not isinstance(samples, int) or samples < 0:
        raise InvalidInputError("samples must be a nonnegative integer")
    return SuiteSpec(graphs, checks, samples)


@dataclass
class SuiteResult:
    records: list[dict] = field(default_factory=list)

    def add(self, graph: str, check: str, passed: bool, **detail) -> None:
        self.records.append({"graph": graph, "check": check, "pass": bool(passed), "detail": detail})

    @property
    def passed(self) -> bool:
        return all(r["pass"] for r in self.records)

    @property
    def failures(self) -> list[dict]:
        return [r for r in self.records if not r["pass"]]

    def to_json(self) -> dict:
        return {
            "verdict": "PASS" if self.passed else "FAIL",
            "matrix": self.records,
            "total": len(self.records),
            "failed": len(self.failures),
        }


def _guarded(res: SuiteResult, name: str, check: str, fn: Callable[[], None]) -> None:
    try:
        fn()
    except (TropjacError, ArithmeticError) as exc:
        res.add(name, check, False, error=type(exc).__name__, message=str(exc))


def _is_bouquet(g: MetricGraph) -> bool:
    """One input vertex carrying only loops."""
    return bool(g.loops) and len(g.edges) == 2 * len(g.loops) and len(g.vertices) == len(g.loops) + 1


def run_suite(spec: SuiteSpec, seed: int = 0, guards: Guards = DEFAULT, fault: str | None = None) -> SuiteResult:
    if fault is not None and fault != "sign":
        raise InvalidInputError(f"unknown fault {fault!r}")
    if fault:
        with inject_fault(fault):
            return _run(spec, seed, guards)
    return _run(spec, seed, guards)


def _run(spec: SuiteSpec, seed: int, guards: Guards) -> SuiteResult:
    res = SuiteResult()
    rng = random.Random(seed)
    for name in sorted(spec.graphs):
        g = spec.graphs[name]
        if g.genus == 0:
            res.add(name, "jacobian", False, error="genus 0")
            continue
        j = jacobian_data(g)
        b = j.genus
        cell_box: dict = {}

        def vor():
            cell = voronoi_cell(j.gram, guards)
            cell_box["cell"] = cell
            f = cell.f_vector()
            euler = sum((-1) ** k * n for k, n in enumerate(f))
            ok = euler == 1 and len(cell.relevant) <= 2 * (2 ** b - 1)
            res.add(name, "voronoi", ok, f_vector=list(f), relevant=len(cell.relevant))

        if "voronoi" in spec.checks or "theta" in spec.checks or "translate" in spec.checks:
            _guarded(res, name, "voronoi", vor)
        cell = cell_box.get("cell")

        if "theta" in spec.checks and cell is not None:
            def theta():
                full = voronoi_torus(cell)
                full.check()
                betti = list(full.homology().betti)
                ok = betti == [comb(b, i) for i in range(b + 1)] and full.euler() == 0
                skel = {}
                for d in range(b):
                    t = theta_skeleton(cell, d)
                    t.check()
                    skel[str(d)] = {"counts": t.counts(), "homology": t.homology().to_json()}
                res.add(name, "theta", ok, torus_betti=betti, skeleta=skel)

            _guarded(res, name, "theta", theta)

        if "translate" in spec.checks and cell is not None and _is_bouquet(g):
            def translate():
                kappa = tuple(mpq(1, 2) for _ in range(b))
                for d in range(1, b):
                    v = translate_match(theta_skeleton(cell, d), PolytopeUnion(b, wd_polytopes(j, g, d, guards)))
                    res.add(name, f"translate:d={d}", v == kappa, translation=None if v is None else [qstr(x) for x in v])

            _guarded(res, name, "translate", translate)

        if "lefschetz" in spec.checks and b <= guards.max_b_homology:
            for d in range(1, b):
                def lef(d=d):
                    rep = lefschetz_check(g, d, guards)
                    res.add(name, f"lefschetz:d={d}", rep.passed and rep.shadow_ok, **rep.to_json())

                _guarded(res, name, f"lefschetz:d={d}", lef)

        if "rank" in spec.checks:
            def rk():
                samples = [canonical_divisor(g)] + [
                    random_divisor(g, rng, rng.randint(0, 3), effective=rng.random() < 0.5) for _ in range(spec.samples)
                ]
                rows = []
                for D in samples:
                    r1, r2 = rank(j, g, D, guards), rank_oracle(g, D.as_dict(), guards)
                    e1 = D.degree >= 0 and is_effective_class(j, g, aj_lift(j, g, D), D.degree, guards)
                    e2 = oracle_effective(g, D.as_dict(), guards)
                    rows.append({"divisor": D.to_json(), "rank": r1, "oracle": r2, "effective": e1, "oracle_effective": e2})
                res.add(name, "rank", all(r["rank"] == r["oracle"] and r["effective"] == r["oracle_effective"] for r in rows), samples=rows)

            _guarded(res, name, "rank", rk)

        if "series" in spec.checks:
            def ser():
                rows = []
                for _ in range(max(1, spec.samples // 2)):
                    D = random_divisor(g, rng, rng.randint(1, 2))
                    L = linear_series(j, g, D, guards)
                    rows.append(L.to_json())
                res.add(name, "series", all(r["reduced_homology_vanishes"] for r in rows), samples=rows)

            _guarded(res, name, "series", ser)
    return res
