"""Size guards; overridable through ``TROPJAC_GUARDS="max_b=4,max_d=3"``."""
from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields, replace

from .errors import GuardExceededError, InvalidInputError


@dataclass(frozen=True)
class Guards:
    max_b: int = 4  # Voronoi computations
    max_b_homology: int = 3  # torus arrangements
    max_d: int = 4
    oracle_vertices: int = 10_000
    containment_dim: int = 4

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise InvalidInputError(f"guard {f.name} must be positive")

    def to_json(self) -> dict:
        return asdict(self)

    def check(self, name: str, value: int) -> None:
        limit = getattr(self, name)
        if value > limit:
            raise GuardExceededError(f"{name}: {value} exceeds guard {limit}")


def from_env(base: Guards | None = None, env: str | None = None) -> Guards:
    base = base or Guards()
    spec = os.environ.get("TROPJAC_GUARDS", "") if env is None else env
    if not spec.strip():
        return base
    names = {f.name for f in fields(Guards)}
    updates = {}
    for item in spec.split(","):
        if not item.strip():
            continue
        key, _, val = item.partition("=")
        key = key.strip()
        if key not in names:
            raise InvalidInputError(f"unknown guard {key!r}")
        try:
            updates[key] = int(val)
        except ValueError as exc:
            raise InvalidInputError(f"guard {key} needs an integer value") from exc
    return replace(base, **updates)


DEFAULT = Guards()
