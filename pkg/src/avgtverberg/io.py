"""JSON file formats for maps, plans, configurations and reports.

Every document carries a ``manifest`` describing the run that produced it.
Floats are written with ``repr`` (shortest round-trip form), so loading and
re-serialising a document reproduces it byte for byte.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .geometry import Configuration, SimplexMap
from .groups import GroupSpec
from .planner import (
    CoincidenceSchedule,
    PartitionPlan,
    enumerate_coincidences,
    identities,
    make_plan,
)


class FormatError(ValueError):
    pass


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1) + "\n"


def write(path: str | Path, doc: dict) -> None:
    Path(path).write_text(dumps(doc))


def read(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc


def digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def manifest(command: str, parameters: dict, seed: int | None = None,
             inputs: dict[str, str] | None = None, wall_clock_s: float = 0.0) -> dict:
    return {
        "command": command,
        "parameters": parameters,
        "seed": seed,
        "tool_version": __version__,
        "input_digests": inputs or {},
        "wall_clock_s": wall_clock_s,
    }


# -- maps ------------------------------------------------------------------

def map_to_dict(f: SimplexMap) -> dict:
    return {"n": f.n, "d": f.d, "vertices": f.vertices.tolist(), "post_map": f.post_map_spec}


def map_from_dict(doc: dict) -> SimplexMap:
    try:
        f = SimplexMap(np.array(doc["vertices"], dtype=float), post_map_spec=doc.get("post_map"))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad map document: {exc}") from exc
    if "n" in doc and doc["n"] != f.n or "d" in doc and doc["d"] != f.d:
        raise FormatError("map header disagrees with its vertex array")
    return f


# -- plans -----------------------------------------------------------------

def schedule_to_dict(plan: PartitionPlan, schedule: CoincidenceSchedule) -> dict:
    idx = plan.spec.index
    return {
        "cosets": [[idx(g) for g in c] for c in schedule.cosets],
        "orbit_families": [
            {"ell": fam.ell, "subset": [list(s) for s in fam.subset],
             "orbits": [[idx(g) for g in o] for o in fam.orbits]}
            for fam in schedule.families
        ],
        "blocks": [[idx(g) for g in b] for b in schedule.blocks],
        "identities": identities(plan, schedule),
    }


def plan_to_dict(plan: PartitionPlan, ell: int | None = None) -> dict:
    schedule = enumerate_coincidences(plan, ell)
    return {
        "theorem": plan.theorem,
        "p": plan.p, "k": plan.k, "r": plan.r, "a": plan.a, "d": plan.d,
        "n": plan.n, "q": plan.q, "q_prime": plan.q_prime,
        "m": plan.m, "m_prime": plan.m_prime,
        "tight_dimension": plan.tight_dimension,
        "orders": list(plan.orders),
        "annihilated": [list(e) for e in plan.annihilated],
        "representatives": [list(e) for e in plan.representatives],
        "certificate": {
            "part": plan.check.part,
            "polynomial": plan.check.polynomial_text(),
            "nonzero": plan.check.nonzero,
            "orientable": plan.check.orientable,
        },
        "indexing": "points are indexed by the lexicographic position of their group element; "
                    "'labels' maps that index to the point label used in 'identities'",
        "labels": list(plan.labels),
        "ell": ell,
        "schedule": schedule_to_dict(plan, schedule),
    }


def plan_document(plan: PartitionPlan, man: dict, ell: int | None = None) -> dict:
    return {"manifest": man, **plan_to_dict(plan, ell)}


def plan_from_dict(doc: dict) -> tuple[PartitionPlan, int | None]:
    """Rebuild the plan from its parameters and check the stored fields."""
    try:
        plan = make_plan(str(doc["theorem"]), doc["p"], doc["k"], doc["r"], doc.get("a", 0), doc["d"])
        ell = doc.get("ell")
    except KeyError as exc:
        raise FormatError(f"plan document lacks field {exc}") from exc
    expected = plan_to_dict(plan, ell)
    for key in ("n", "orders", "annihilated", "representatives", "schedule"):
        if key in doc and doc[key] != expected[key]:
            raise FormatError(f"plan field {key!r} does not match its parameters")
    return plan, ell


# -- configurations and reports --------------------------------------------

def config_to_dict(config: Configuration) -> dict:
    spec = config.spec
    return {
        "orders": list(config.orders),
        "groups": [
            {"index": i, "element": list(spec.element(i)), "support": list(s),
             "weights": [float(x) for x in w]}
            for i, (s, w) in enumerate(zip(config.supports, config.weights))
        ],
    }


def config_from_dict(doc: dict) -> Configuration:
    try:
        orders = tuple(doc["orders"])
        q = GroupSpec(orders).order
        groups = sorted(doc["groups"], key=lambda g: g["index"])
        if [g["index"] for g in groups] != list(range(q)):
            raise FormatError(f"configuration must list every index 0..{q - 1} once")
        return Configuration(orders, tuple(tuple(g["support"]) for g in groups),
                             tuple(np.array(g["weights"], dtype=float) for g in groups))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad configuration document: {exc}") from exc


def _complex(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def report_to_dict(report, plan: PartitionPlan, extra: dict[str, Any] | None = None) -> dict:
    spec = plan.spec
    killed = set(plan.annihilated)
    dev = report.deviations
    doc = {
        "residual": report.residual,
        "objective_residual": report.objective_residual,
        "deviation_bound": report.deviation_bound,
        "deviations": {"coset": dev.coset, "orbit": dev.orbit, "block": dev.block},
        "alternating_sum": report.alternating_sum,
        "support_profile": list(report.support_profile),
        "effective_supports": [list(s) for s in report.effective_supports],
        "points": report.points.tolist(),
        "coefficients": [
            {"character": list(e), "annihilated": e in killed,
             "values": [_complex(c) for c in report.spectrum.coeffs[spec.index(e)]]}
            for e in spec.elements
        ],
    }
    doc.update(extra or {})
    return doc
