"""Command-line interface: ``avgtverberg {plan,obstruction,solve,verify,oracle}``.

Exit codes: 0 success, 1 invalid input, 2 unconverged / out of tolerance,
3 uncertifiable plan.

Environment overrides (optional): ``AVGTV_TOL``, ``AVGTV_MAX_ITERS`` and
``AVGTV_RESTARTS`` replace the defaults of the corresponding flags.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
import warnings

import numpy as np

from . import io
from .geometry import InvalidConfigurationError, SimplexMap, random_affine_map
from .groups import GroupSpec, nonzero_characters
from .obstruction import TEXT_TERM_LIMIT, complex_check, real_check, split_order_two
from .oracles import DegenerateInputError, radon_oracle, tverberg_oracle_affine
from .planner import BLOCK, ORBIT, UncertifiablePlanError, enumerate_coincidences, identities, make_plan
from .solver import SolveOptions, planar_alternating_case, solve, verify

EXIT_OK, EXIT_INVALID, EXIT_UNCONVERGED, EXIT_UNCERTIFIABLE = 0, 1, 2, 3

log = logging.getLogger("avgtverberg")


class InputError(Exception):
    pass


def _env(name: str, default, cast):
    value = os.environ.get(name)
    return default if value is None else cast(value)


def _emit(doc: dict, path: str | None) -> None:
    if path:
        io.write(path, doc)
    else:
        sys.stdout.write(io.dumps(doc))


def _digests(*paths) -> dict[str, str]:
    return {str(p): io.digest(p) for p in paths if p}


# -- plan ------------------------------------------------------------------

def cmd_plan(args) -> int:
    t0 = time.perf_counter()
    try:
        plan = make_plan(args.theorem, args.p, args.k, args.r, args.a, args.d)
        schedule = enumerate_coincidences(plan, args.ell)
    except UncertifiablePlanError as exc:
        print(f"uncertifiable plan: obstruction polynomial vanishes\n  h = {_poly_summary(exc.check)}")
        return EXIT_UNCERTIFIABLE
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    print(f"group   Z_{' + Z_'.join(map(str, plan.orders))}  (q = {plan.q})")
    print(f"q'      {plan.q_prime} annihilated characters")
    print(f"n       {plan.n}")
    print(f"N(q,d)  {plan.tight_dimension}")
    print(f"check   part ({plan.lemma_part}) nonzero: {_poly_summary(plan.check)[:72]}")
    if args.identities:
        for line in identities(plan, schedule):
            print(f"  {line}")
    params = {k: getattr(args, k) for k in ("theorem", "p", "k", "r", "a", "d", "ell")}
    man = io.manifest("plan", params, wall_clock_s=round(time.perf_counter() - t0, 6))
    if args.output:
        io.write(args.output, io.plan_document(plan, man, args.ell))
    return EXIT_OK


# -- obstruction -----------------------------------------------------------

def _poly_summary(check) -> str:
    text = check.polynomial_text()
    return text if text is not None else f"(not expanded: more than {TEXT_TERM_LIMIT} terms)"


def _load_characters(path: str, spec: GroupSpec) -> list[tuple[int, ...]]:
    doc = io.read(path)
    chars = doc.get("characters") if isinstance(doc, dict) else doc
    if not isinstance(chars, list):
        raise InputError("character file must be a list of exponent vectors or {'characters': [...]}")
    out = []
    for e in chars:
        try:
            e = tuple(int(b) for b in e)
            spec.check(e)
        except (TypeError, ValueError) as exc:
            raise InputError(f"malformed character {e!r}: {exc}") from exc
        out.append(e)
    return out


def cmd_obstruction(args) -> int:
    t0 = time.perf_counter()
    try:
        spec = GroupSpec(args.orders)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if args.all_nonzero:
        chars = nonzero_characters(spec)
    elif args.characters:
        chars = _load_characters(args.characters, spec)
    else:
        raise InputError("give --characters FILE or --all-nonzero")
    a = complex_check(spec.orders, chars, args.d)
    doc = {"orders": list(spec.orders), "d": args.d, "characters": [list(e) for e in chars],
           "complex": {"nonzero": a.nonzero, "n": a.n, "m": a.m, "polynomial": a.polynomial_text()}}
    print(f"(a) complex criterion: {'nonzero' if a.nonzero else 'zero'}   n = 2dm+q-1 = {a.n}")
    print(f"    h = {_poly_summary(a)[:200]}")
    order2, _ = split_order_two(spec, chars)
    if args.d % 2 == 1 and order2:
        b = real_check(spec.orders, chars, args.d, literal=args.literal)
        doc["real"] = {"nonzero": b.nonzero, "n": b.n, "m": b.m, "m_prime": b.m_prime,
                       "orientable": b.orientable, "polynomial": b.polynomial_text()}
        print(f"(b) mod 2 criterion:   {'nonzero' if b.nonzero else 'zero'}   "
              f"n = d(2m-m')+q-1 = {b.n}   (m = {b.m}, m' = {b.m_prime})")
        print(f"    h = {_poly_summary(b)[:200]}")
        print(f"    bundle orientable: {b.orientable}")
    params = {"orders": list(spec.orders), "d": args.d, "all_nonzero": args.all_nonzero,
              "literal": args.literal}
    doc = {"manifest": io.manifest("obstruction", params, inputs=_digests(args.characters),
                                   wall_clock_s=round(time.perf_counter() - t0, 6)), **doc}
    if args.output:
        io.write(args.output, doc)
    return EXIT_OK


# -- solve / verify --------------------------------------------------------

def _load_plan(path: str):
    try:
        return io.plan_from_dict(io.read(path))
    except UncertifiablePlanError as exc:
        raise InputError(f"plan file describes an uncertifiable plan: {exc}") from exc
    except (io.FormatError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def _load_map(args, plan) -> SimplexMap:
    if args.random_map:
        n = args.n if args.n is not None else plan.n
        f = random_affine_map(n, plan.d, args.seed)
        if args.map_out:
            io.write(args.map_out, io.map_to_dict(f))
        return f
    if not args.map:
        raise InputError("give --map FILE or --random-map")
    try:
        f = io.map_from_dict(io.read(args.map))
    except (io.FormatError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    if f.d != plan.d:
        raise InputError(f"map has target dimension {f.d}, plan expects {plan.d}")
    return f


def _options(args) -> SolveOptions:
    return SolveOptions(mode=args.mode, seed=args.seed, tol=args.tol, max_iters=args.max_iters,
                        restarts=args.restarts, threads=args.threads)


def _report_extra(plan, report, converged: bool | None = None) -> dict:
    extra = {}
    if converged is not None:
        extra["converged"] = converged
    if plan.theorem == BLOCK and plan.p ** plan.k == 2 and plan.d == 2:
        extra["planar_case"] = planar_alternating_case(report.support_profile, plan.r)
    return extra


def cmd_solve(args) -> int:
    t0 = time.perf_counter()
    plan, _ = _load_plan(args.plan)
    f = _load_map(args, plan)
    opts = _options(args)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore" if args.quiet else "default")
        result = solve(f, plan, opts)
    params = {"mode": opts.mode, "tol": opts.tol, "max_iters": opts.max_iters,
              "restarts": opts.restarts, "threads": opts.threads,
              "random_map": args.random_map, "n": f.n}
    man = io.manifest("solve", params, seed=args.seed,
                      inputs=_digests(args.plan, args.map if not args.random_map else None),
                      wall_clock_s=round(time.perf_counter() - t0, 6))
    config_doc = {"manifest": man, **io.config_to_dict(result.config)}
    report_doc = {"manifest": man, **io.report_to_dict(
        result.report, plan, {"mode": result.mode, "assignments_tried": result.assignments_tried,
                              **_report_extra(plan, result.report, result.converged)})}
    _emit(config_doc, args.output)
    if args.report:
        io.write(args.report, report_doc)
    state = "converged" if result.converged else "NOT converged"
    print(f"{state}: residual {result.residual:.3e}, worst coincidence deviation "
          f"{result.report.deviations.worst:.3e}, profile {list(result.report.support_profile)}",
          file=sys.stderr)
    return EXIT_OK if result.converged else EXIT_UNCONVERGED


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    plan, _ = _load_plan(args.plan)
    f = _load_map(args, plan)
    try:
        config = io.config_from_dict(io.read(args.config))
        report = verify(f, config, plan)
    except (io.FormatError, InvalidConfigurationError, ValueError) as exc:
        raise InputError(f"invalid configuration: {exc}") from exc
    ok = report.within(args.tol)
    man = io.manifest("verify", {"tol": args.tol}, inputs=_digests(args.plan, args.map, args.config),
                      wall_clock_s=round(time.perf_counter() - t0, 6))
    doc = {"manifest": man, **io.report_to_dict(report, plan, {"within_tolerance": ok,
                                                               **_report_extra(plan, report)})}
    _emit(doc, args.report)
    print(f"residual {report.residual:.3e}; deviations coset {report.deviations.coset:.3e} "
          f"orbit {report.deviations.orbit:.3e} block {report.deviations.block:.3e}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_UNCONVERGED


# -- oracle ----------------------------------------------------------------

UNIT_SQUARE = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]


def cmd_oracle(args) -> int:
    t0 = time.perf_counter()
    if args.unit_square:
        pts = np.array(UNIT_SQUARE)
    elif args.points:
        doc = io.read(args.points)
        pts = np.array(doc["points"] if isinstance(doc, dict) and "points" in doc
                       else doc.get("vertices") if isinstance(doc, dict) else doc, dtype=float)
    else:
        raise InputError("give --points FILE or --unit-square")
    try:
        if args.tverberg:
            part = tverberg_oracle_affine(pts, args.tverberg)
            out = ({"found": False} if part is None else
                   {"found": True, "groups": [list(g) for g in part.groups],
                    "witness": part.witness.tolist()})
        else:
            rad = radon_oracle(pts)
            out = {"partition": [list(rad.positive), list(rad.negative)],
                   "witness": rad.witness.tolist(), "coefficients": rad.coefficients.tolist()}
    except (DegenerateInputError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    params = {"radon": not args.tverberg, "tverberg": args.tverberg}
    _emit({"manifest": io.manifest("oracle", params, inputs=_digests(args.points),
                                   wall_clock_s=round(time.perf_counter() - t0, 6)), **out},
          args.output)
    return EXIT_OK


# -- parser ----------------------------------------------------------------

def _add_solver_flags(sp) -> None:
    sp.add_argument("--plan", required=True)
    sp.add_argument("--map")
    sp.add_argument("--random-map", action="store_true", help="vertex images uniform in [-1,1]^d")
    sp.add_argument("--n", type=int, help="simplex dimension for --random-map (default: plan n)")
    sp.add_argument("--map-out", help="write the generated random map here")
    sp.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="avgtverberg", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("plan", help="build and certify a partition plan")
    sp.add_argument("--theorem", choices=[ORBIT, BLOCK], required=True,
                    help="1.3: coset and orbit averages; 1.4: block averages")
    sp.add_argument("-p", type=int, required=True)
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("-r", type=int, default=1)
    sp.add_argument("-a", type=int, default=0)
    sp.add_argument("-d", type=int, required=True)
    sp.add_argument("--ell", type=int, help="orbit length (default: all admissible)")
    sp.add_argument("-o", "--output")
    sp.add_argument("--identities", action="store_true", help="print every planned coincidence")
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("obstruction", help="decide the polynomial criteria for a character list")
    sp.add_argument("--orders", type=int, nargs="+", required=True)
    sp.add_argument("--characters", help="JSON list of exponent vectors")
    sp.add_argument("--all-nonzero", action="store_true")
    sp.add_argument("-d", type=int, required=True)
    sp.add_argument("--literal", action="store_true",
                    help="use eps_i mod 2 for the x-coefficients instead of the sign indicator")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_obstruction)

    sp = sub.add_parser("solve", help="search for a configuration realising a plan")
    _add_solver_flags(sp)
    sp.add_argument("--mode", choices=["auto", "exhaustive", "anneal"], default="auto")
    sp.add_argument("--tol", type=float, default=_env("AVGTV_TOL", 1e-8, float))
    sp.add_argument("--max-iters", type=int, default=_env("AVGTV_MAX_ITERS", 50_000, int))
    sp.add_argument("--restarts", type=int, default=_env("AVGTV_RESTARTS", 8, int))
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--quiet", action="store_true")
    sp.add_argument("-o", "--output", help="configuration file (default: stdout)")
    sp.add_argument("--report")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("verify", help="report spectrum and coincidence deviations of a configuration")
    _add_solver_flags(sp)
    sp.add_argument("--config", required=True)
    sp.add_argument("--tol", type=float, default=_env("AVGTV_TOL", 1e-8, float))
    sp.add_argument("--report", help="report file (default: stdout)")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("oracle", help="Radon / Tverberg oracles for point sets")
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--radon", action="store_true", default=True)
    group.add_argument("--tverberg", type=int, metavar="Q")
    sp.add_argument("--points", help="JSON list of points or a map file")
    sp.add_argument("--unit-square", action="store_true")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, io.FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except json.JSONDecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
