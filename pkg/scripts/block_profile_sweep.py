"""Support-size profiles of block-average solutions in the plane.

Solves the block plan (p, k, r) = (2, 1, r) with d = 2 on seeded random
affine maps and tallies which planar alternating case the support profile
falls into.

    python3 scripts/block_profile_sweep.py --r 2 --maps 50
"""

from __future__ import annotations

import argparse
import collections
import json
from dataclasses import asdict, dataclass

from avgtverberg.geometry import random_affine_map
from avgtverberg.planner import plan_block_averages
from avgtverberg.solver import SolveOptions, planar_alternating_case, solve


@dataclass
class SweepConfig:
    r: int = 2
    maps: int = 50
    seed: int = 0
    restarts: int = 16
    tol: float = 1e-8


def run(cfg: SweepConfig) -> dict:
    plan = plan_block_averages(2, 1, cfg.r, 2)
    opts = SolveOptions(seed=cfg.seed, restarts=cfg.restarts, tol=cfg.tol)
    cases = collections.Counter()
    profiles = collections.Counter()
    good = 0
    for i in range(cfg.maps):
        f = random_affine_map(plan.n, plan.d, seed=cfg.seed + i)
        res = solve(f, plan, opts)
        if res.report.alternating_sum < 1e-6:
            good += 1
        if res.converged:
            profile = res.report.support_profile
            profiles[str(profile)] += 1
            cases[str(planar_alternating_case(profile, cfg.r))] += 1
    return {"n": plan.n, "small_alternating_sum": good, "maps": cfg.maps,
            "cases": dict(cases), "profiles": dict(profiles)}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in asdict(SweepConfig()).items():
        ap.add_argument("--" + name.replace("_", "-"), type=type(default), default=default)
    cfg = SweepConfig(**vars(ap.parse_args()))
    print(json.dumps({"config": asdict(cfg), **run(cfg)}, indent=2))


if __name__ == "__main__":
    main()
