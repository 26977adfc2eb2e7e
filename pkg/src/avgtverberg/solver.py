"""Search for configurations whose planned Fourier transforms vanish.

The outer problem chooses which vertices form which face (exhaustively or
by simulated annealing).  For a fixed choice of faces the inner problem
minimises the squared norm of the planned transforms over a product of
simplices.  For affine maps this is a convex quadratic, solved by
accelerated projected gradient with an active-set polishing step and a
Frank-Wolfe gap that certifies when the minimum is bounded away from zero.
"""
from __future__ import annotations

import itertools
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .fourier import SpectrumTable, ValueTable, forward_transform
from .geometry import (
    SUPPORT_THRESHOLD,
    Configuration,
    SimplexMap,
    project_to_simplex,
)
from .groups import Character
from .planner import (
    BLOCK,
    PartitionPlan,
    ScheduleDeviations,
    enumerate_coincidences,
    evaluate_schedule,
)

log = logging.getLogger(__name__)

FD_STEP = 1e-6


@dataclass(frozen=True)
class Objective:
    residual: float  # sqrt of value
    value: float  # sum over representatives and coordinates of |c_{i,eps}|^2
    gradient: tuple[np.ndarray, ...]  # d value / d weights, one array per face


def _coefficient_rows(plan: PartitionPlan, chars: Sequence[Character]) -> np.ndarray:
    spec = plan.spec
    return np.conj(spec.character_table[[spec.index(e) for e in chars]]) / spec.order


def linear_operator(f: SimplexMap, plan: PartitionPlan, supports: Sequence[Sequence[int]],
                    chars: Sequence[Character] | None = None) -> np.ndarray:
    """Real matrix M with M @ (stacked weights) = (Re c, Im c) for an affine map."""
    chars = plan.representatives if chars is None else chars
    rows = _coefficient_rows(plan, chars)  # (m, q)
    gs = np.array([g for g, s in enumerate(supports) for _ in s], dtype=int)
    vs = np.array([v for s in supports for v in s], dtype=int)
    C = rows[:, gs][:, None, :] * f.vertices[vs].T[None, :, :]
    C = C.reshape(len(chars) * f.d, len(vs))
    return np.vstack([C.real, C.imag])


def _split(x: np.ndarray, supports) -> tuple[np.ndarray, ...]:
    out, i = [], 0
    for s in supports:
        out.append(x[i:i + len(s)].copy())
        i += len(s)
    return tuple(out)


def _value_from_points(plan: PartitionPlan, points: np.ndarray) -> float:
    c = _coefficient_rows(plan, plan.representatives) @ points
    return float(np.sum(np.abs(c) ** 2))


def evaluate_objective(f: SimplexMap, plan: PartitionPlan, config: Configuration) -> Objective:
    """Squared norm of the planned transforms and its gradient in the weights.

    The gradient is exact for affine maps and a central difference with
    step ``FD_STEP`` when a post-map is present.
    """
    config.validate(f.n)
    if tuple(config.orders) != plan.orders:
        raise ValueError("configuration and plan index different groups")
    x = np.concatenate(config.weights)
    if f.is_affine:
        M = linear_operator(f, plan, config.supports)
        res = M @ x
        value = float(res @ res)
        grad = 2.0 * M.T @ res
    else:
        value = _value_from_points(plan, config.points(f))
        grad = _fd_gradient(f, plan, config.supports, x)
    return Objective(math.sqrt(value), value, _split(grad, config.supports))


def _points(f: SimplexMap, supports, x: np.ndarray) -> np.ndarray:
    return np.array([f(s, w) for s, w in zip(supports, _split(x, supports))])


def _fd_gradient(f, plan, supports, x, step: float = FD_STEP) -> np.ndarray:
    grad = np.empty_like(x)
    for j in range(len(x)):
        e = np.zeros_like(x)
        e[j] = step
        hi = _value_from_points(plan, _points(f, supports, x + e))
        lo = _value_from_points(plan, _points(f, supports, x - e))
        grad[j] = (hi - lo) / (2 * step)
    return grad


# --------------------------------------------------------------------------
# inner problem: fixed faces


@dataclass(frozen=True)
class InnerResult:
    x: np.ndarray
    residual: float
    status: str  # "converged" | "infeasible" | "budget"
    iterations: int


def _project(x: np.ndarray, bounds) -> np.ndarray:
    return np.concatenate([project_to_simplex(x[a:b]) for a, b in bounds])


def _fw_gap(grad: np.ndarray, x: np.ndarray, bounds) -> float:
    return float(sum(grad[a:b] @ x[a:b] - grad[a:b].min() for a, b in bounds))


def _polish(M: np.ndarray, x: np.ndarray, bounds) -> np.ndarray | None:
    """Least-squares minimiser on the face of the current active set."""
    active = x > 1e-13
    for a, b in bounds:
        if not active[a:b].any():
            active[a + int(np.argmax(x[a:b]))] = True
    idx = np.nonzero(active)[0]
    nb = len(bounds)
    B = np.zeros((nb, len(idx)))
    for row, (a, b) in enumerate(bounds):
        B[row] = (idx >= a) & (idx < b)
    MA = M[:, idx]
    K = np.block([[2 * MA.T @ MA, B.T], [B, np.zeros((nb, nb))]])
    rhs = np.concatenate([np.zeros(len(idx)), np.ones(nb)])
    sol = np.linalg.lstsq(K, rhs, rcond=None)[0][:len(idx)]
    if sol.min() < -1e-12:
        return None
    out = np.zeros_like(x)
    out[idx] = np.maximum(sol, 0.0)
    for a, b in bounds:
        s = out[a:b].sum()
        if s <= 0:
            return None
        out[a:b] /= s
    return out


def solve_fixed_affine(M: np.ndarray, x0: np.ndarray, bounds, tol: float,
                       max_iters: int, check_every: int = 20) -> InnerResult:
    tol2 = tol * tol
    L = 2.0 * np.linalg.norm(M, 2) ** 2 + 1e-300
    x = _project(x0, bounds)
    resid = lambda z: float(np.linalg.norm(M @ z))

    best = x
    best_r = resid(x)
    polished = _polish(M, x, bounds)
    if polished is not None and resid(polished) < best_r:
        best, best_r = polished, resid(polished)
        x = polished
    if best_r <= tol:
        return InnerResult(best, best_r, "converged", 0)

    y, t = x.copy(), 1.0
    for it in range(1, max_iters + 1):
        gy = 2.0 * M.T @ (M @ y)
        x_new = _project(y - gy / L, bounds)
        if gy @ (x_new - x) > 0:  # adaptive restart
            t = 1.0
        t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        y = x_new + ((t - 1.0) / t_new) * (x_new - x)
        x, t = x_new, t_new
        if it % check_every:
            continue
        rx = M @ x
        r = float(np.linalg.norm(rx))
        if r < best_r:
            best, best_r = x, r
        if best_r <= tol:
            return InnerResult(best, best_r, "converged", it)
        gap = _fw_gap(2.0 * M.T @ rx, x, bounds)
        if r * r - gap > tol2:
            return InnerResult(best, best_r, "infeasible", it)
        if it % (5 * check_every) == 0:
            polished = _polish(M, x, bounds)
            if polished is not None:
                rp = resid(polished)
                if rp < best_r:
                    best, best_r = polished, rp
                    x, y, t = polished, polished.copy(), 1.0
                    if best_r <= tol:
                        return InnerResult(best, best_r, "converged", it)
    return InnerResult(best, best_r, "budget", max_iters)


def solve_fixed_general(f, plan, supports, x0, bounds, tol, max_iters) -> InnerResult:
    """Projected gradient with backtracking for maps with a post-map."""
    x = _project(x0, bounds)
    value = _value_from_points(plan, _points(f, supports, x))
    step = 1.0
    for it in range(1, max_iters + 1):
        if math.sqrt(value) <= tol:
            return InnerResult(x, math.sqrt(value), "converged", it - 1)
        g = _fd_gradient(f, plan, supports, x)
        while True:
            cand = _project(x - step * g, bounds)
            cv = _value_from_points(plan, _points(f, supports, cand))
            if cv <= value - 1e-4 * g @ (x - cand) or step < 1e-12:
                break
            step *= 0.5
        if step < 1e-12 or np.allclose(cand, x, atol=1e-15, rtol=0):
            return InnerResult(x, math.sqrt(value), "budget", it)
        x, value = cand, cv
        step = min(step * 2.0, 1e6)
    return InnerResult(x, math.sqrt(value), "budget", max_iters)


# --------------------------------------------------------------------------
# outer problem: which vertices go to which face


@dataclass(frozen=True)
class SolveOptions:
    mode: str = "auto"  # "auto", "exhaustive" or "anneal"
    seed: int = 0
    tol: float = 1e-8
    max_iters: int = 50_000
    restarts: int = 8
    threads: int = 1
    exhaustive_limit: int = 10 ** 6
    anneal_steps: int = 3000
    probe_iters: int = 400
    cooling: float = 0.95
    max_assignments: int | None = None


def assignment_count(n: int, q: int) -> int:
    return (q + 1) ** (n + 1)


def iter_assignments(n: int, q: int) -> Iterator[tuple[int, ...]]:
    """All vertex assignments with every face nonempty, most vertices used first."""
    verts = range(n + 1)
    for used in range(n + 1, q - 1, -1):
        for subset in itertools.combinations(verts, used):
            for labels in itertools.product(range(q), repeat=used):
                if len(set(labels)) < q:
                    continue
                a = [-1] * (n + 1)
                for v, g in zip(subset, labels):
                    a[v] = g
                yield tuple(a)


class _Problem:
    """Inner solves for one (map, plan) pair, memoised per assignment and budget."""

    def __init__(self, f: SimplexMap, plan: PartitionPlan, opts: SolveOptions):
        self.f, self.plan, self.opts = f, plan, opts
        self.cache: dict = {}

    def solve(self, assignment: tuple[int, ...], iters: int, start=None) -> tuple[Configuration, InnerResult]:
        key = (assignment, iters, None if start is None else start.tobytes())
        if key in self.cache:
            return self.cache[key]
        q = self.plan.q
        supports = [tuple(v for v, g in enumerate(assignment) if g == i) for i in range(q)]
        bounds, i = [], 0
        for s in supports:
            bounds.append((i, i + len(s)))
            i += len(s)
        x0 = start if start is not None else np.concatenate([np.full(len(s), 1.0 / len(s)) for s in supports])
        if self.f.is_affine:
            M = linear_operator(self.f, self.plan, supports)
            res = solve_fixed_affine(M, x0, bounds, self.opts.tol, iters)
        else:
            res = solve_fixed_general(self.f, self.plan, supports, x0, bounds, self.opts.tol,
                                      min(iters, 2000))
        config = Configuration(self.plan.orders, tuple(supports), _split(res.x, supports))
        self.cache[key] = (config, res)
        return config, res


@dataclass(frozen=True)
class FourierReport:
    spectrum: SpectrumTable
    residual: float  # norm over the whole annihilated set
    objective_residual: float  # norm over the representatives
    deviations: ScheduleDeviations
    effective_supports: tuple[tuple[int, ...], ...]
    support_profile: tuple[int, ...]
    points: np.ndarray = field(compare=False)
    alternating_sum: float | None = None
    annihilated_magnitudes: np.ndarray = field(default_factory=lambda: np.zeros(0), compare=False)

    @property
    def deviation_bound(self) -> float:
        """Coincidence deviations never exceed 2 q' max|c| over annihilated characters."""
        if not self.annihilated_magnitudes.size:
            return 0.0
        q_prime = self.annihilated_magnitudes.size // self.spectrum.d
        return 2 * q_prime * float(self.annihilated_magnitudes.max())

    def within(self, tol: float) -> bool:
        q_prime = self.annihilated_magnitudes.size // self.spectrum.d
        return self.residual <= tol and self.deviations.worst <= 2 * q_prime * tol + 1e-12


def verify(f: SimplexMap, config: Configuration, plan: PartitionPlan) -> FourierReport:
    """Full spectrum of a configuration plus deviations of every planned coincidence."""
    config.validate(f.n)
    if tuple(config.orders) != plan.orders:
        raise ValueError("configuration and plan index different groups")
    pts = config.points(f)
    spec = plan.spec
    spectrum = forward_transform(ValueTable(spec, pts))
    ann = spectrum.coeffs[[spec.index(e) for e in plan.annihilated]]
    reps = spectrum.coeffs[[spec.index(e) for e in plan.representatives]]
    schedule = enumerate_coincidences(plan)
    devs = evaluate_schedule(schedule, spec, pts)
    alt = None
    if plan.theorem == BLOCK and plan.p ** plan.k == 2:
        alt = float(np.linalg.norm(pts[:plan.r].sum(axis=0) - pts[plan.r:].sum(axis=0)))
    return FourierReport(
        spectrum=spectrum,
        residual=float(np.sqrt(np.sum(np.abs(ann) ** 2))),
        objective_residual=float(np.sqrt(np.sum(np.abs(reps) ** 2))),
        deviations=devs,
        effective_supports=config.effective_supports(),
        support_profile=config.support_profile(),
        points=pts,
        alternating_sum=alt,
        annihilated_magnitudes=np.abs(ann).ravel() if ann.size else np.zeros(0),
    )


@dataclass(frozen=True)
class SolveResult:
    config: Configuration
    report: FourierReport
    residual: float
    converged: bool
    mode: str
    assignments_tried: int


def _solve_batch(problem: _Problem, batch, iters, pool):
    if pool is None:
        results = [problem.solve(a, iters) for a in batch]
    else:
        results = list(pool.map(lambda a: problem.solve(a, iters), batch))
    return results


def _exhaustive(problem: _Problem, opts: SolveOptions, pool):
    n, q = problem.f.n, problem.plan.q
    best = None
    tried = 0
    batch_size = max(1, opts.threads)
    it = iter_assignments(n, q)
    while True:
        batch = list(itertools.islice(it, batch_size))
        if opts.max_assignments is not None:
            batch = batch[:max(0, opts.max_assignments - tried)]
        if not batch:
            break
        for a, (config, res) in zip(batch, _solve_batch(problem, batch, opts.max_iters, pool)):
            tried += 1
            if best is None or res.residual < best[1].residual:
                best = (config, res)
            if res.status == "converged":
                return config, res, tried
    return best[0], best[1], tried


def _random_assignment(rng: np.random.Generator, n: int, q: int) -> list[int]:
    a = list(rng.integers(-1, q, size=n + 1))
    perm = rng.permutation(n + 1)
    for g in range(q):
        if g not in a:
            counts = {h: a.count(h) for h in set(a)}
            for v in perm:
                if a[v] == -1 or counts[a[v]] > 1:
                    counts[a[v]] = counts.get(a[v], 0) - 1
                    a[v] = g
                    break
    return [int(v) for v in a]


def _anneal_chain(problem: _Problem, opts: SolveOptions, chain: int):
    n, q = problem.f.n, problem.plan.q
    rng = np.random.default_rng([opts.seed, chain])
    state = tuple(_random_assignment(rng, n, q))
    energy = problem.solve(state, opts.probe_iters)[1].residual
    best_state, best_energy = state, energy
    temp = max(energy, 1e-6)
    sweep = n + 1
    tried = 1
    for step in range(opts.anneal_steps):
        if best_energy <= opts.tol:
            break
        v = int(rng.integers(n + 1))
        choices = [g for g in range(-1, q) if g != state[v]]
        g_new = choices[int(rng.integers(len(choices)))]
        if state[v] >= 0 and state.count(state[v]) == 1:
            continue  # would empty a face
        cand = state[:v] + (g_new,) + state[v + 1:]
        e_new = problem.solve(cand, opts.probe_iters)[1].residual
        tried += 1
        if e_new <= energy or rng.random() < math.exp(-(e_new - energy) / temp):
            state, energy = cand, e_new
            if energy < best_energy:
                best_state, best_energy = state, energy
        if (step + 1) % sweep == 0:
            temp *= opts.cooling
    config, res = problem.solve(best_state, opts.max_iters)
    return config, res, tried


def _anneal(problem: _Problem, opts: SolveOptions, pool):
    best, tried = None, 0
    batch_size = max(1, opts.threads)
    for start in range(0, opts.restarts, batch_size):
        chains = range(start, min(start + batch_size, opts.restarts))
        if pool is None:
            outs = [_anneal_chain(problem, opts, c) for c in chains]
        else:
            outs = list(pool.map(lambda c: _anneal_chain(problem, opts, c), chains))
        for config, res, t in outs:
            tried += t
            if best is None or res.residual < best[1].residual:
                best = (config, res)
            if res.status == "converged":
                return config, res, tried
    return best[0], best[1], tried


def solve(f: SimplexMap, plan: PartitionPlan, options: SolveOptions | None = None) -> SolveResult:
    """Best configuration found for ``plan`` under ``f``.

    Never raises on failure to converge; check ``result.converged``.
    """
    opts = options or SolveOptions()
    if f.n < plan.n:
        warnings.warn(f"map dimension {f.n} is below the plan's {plan.n}; no zero is guaranteed",
                      stacklevel=2)
    if f.n + 1 < plan.q:
        raise ValueError(f"{f.n + 1} vertices cannot carry {plan.q} disjoint faces")
    mode = opts.mode
    if mode == "auto":
        mode = "exhaustive" if assignment_count(f.n, plan.q) <= opts.exhaustive_limit else "anneal"
    if mode not in ("exhaustive", "anneal"):
        raise ValueError(f"unknown mode {mode!r}")
    problem = _Problem(f, plan, opts)
    pool = ThreadPoolExecutor(opts.threads) if opts.threads > 1 else None
    try:
        search = _exhaustive if mode == "exhaustive" else _anneal
        config, res, tried = search(problem, opts, pool)
    finally:
        if pool is not None:
            pool.shutdown()
    report = verify(f, config, plan)
    log.info("solve: mode=%s tried=%d residual=%.3e", mode, tried, res.residual)
    return SolveResult(config, report, res.residual, res.residual <= opts.tol, mode, tried)


def planar_alternating_case(profile: Sequence[int], r: int) -> str | None:
    """'a': one triangle and 2r-1 vertices; 'b': two edges and 2r-2 vertices."""
    profile = tuple(sorted(profile, reverse=True))
    if profile == (3,) + (1,) * (2 * r - 1):
        return "a"
    if profile == (2, 2) + (1,) * (2 * r - 2):
        return "b"
    return None


def max_pairwise_distance(points: np.ndarray) -> float:
    pts = np.asarray(points)
    diffs = pts[:, None, :] - pts[None, :, :]
    return float(np.max(np.linalg.norm(diffs, axis=-1)))
