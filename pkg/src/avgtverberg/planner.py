"""Partition plans: which transforms to annihilate and what that buys.

Two plan families are built on G = Z_p^k + Z_r (factor orders
``(p,)*k + (r,)``):

* ``"1.3"`` (:func:`plan_orbit_averages`): with H = Z_p^a the first ``a``
  factors and Gbar the remaining ``k - a + 1``, kill every character off
  the coordinate axes of Gbar.  Values become constant on H-cosets and
  every transversal of a product subset S of Gbar has the same average.
* ``"1.4"`` (:func:`plan_block_averages`): kill (Z_p^k - 0) + 0.  The p^k
  blocks {(h, 0), ..., (h, r - 1)} then share one average.

Every plan is certified by the obstruction polynomial before it is
returned.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from .groups import Character, Element, GroupSpec, is_order_two
from .obstruction import ObstructionCheck, complex_check, real_check

ORBIT = "1.3"
BLOCK = "1.4"


class UncertifiablePlanError(ValueError):
    """The obstruction polynomial of a requested plan vanishes."""

    def __init__(self, check: ObstructionCheck):
        self.check = check
        super().__init__(f"obstruction polynomial vanishes (part {check.part}, d = {check.d})")


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class PartitionPlan:
    theorem: str
    p: int
    k: int
    r: int
    a: int
    d: int
    orders: tuple[int, ...]
    n: int
    q_prime: int
    m: int
    m_prime: int
    annihilated: tuple[Character, ...]
    representatives: tuple[Character, ...]
    check: ObstructionCheck = field(compare=False, repr=False)

    @cached_property
    def spec(self) -> GroupSpec:
        return GroupSpec(self.orders)

    @property
    def q(self) -> int:
        return self.spec.order

    @property
    def tight_dimension(self) -> int:
        """(q - 1)(d + 1), the dimension guaranteeing a full Tverberg partition."""
        return (self.q - 1) * (self.d + 1)

    @property
    def lemma_part(self) -> str:
        return self.check.part

    @cached_property
    def labels(self) -> tuple[int, ...]:
        """Point label of each element, indexed canonically."""
        return tuple(point_label(self, g) for g in self.spec.elements)


def _representatives(spec: GroupSpec, chars: Sequence[Character]) -> list[Character]:
    return [e for e in chars if e <= spec.neg(e)]


def _certify(spec: GroupSpec, annihilated: list[Character], reps: list[Character], d: int) -> ObstructionCheck:
    if d % 2 == 0:
        # R^d = C^(d/2): every annihilated character is a separate complex transform
        return complex_check(spec.orders, annihilated, d // 2)
    if not any(is_order_two(spec, e) for e in annihilated):
        return complex_check(spec.orders, reps, d)
    return real_check(spec.orders, reps, d)


def _validate(p, k, r, d, a=0):
    for name, v in (("p", p), ("k", k), ("r", r), ("d", d), ("a", a)):
        if int(v) != v:
            raise ValueError(f"{name} must be an integer")
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    if k < 0 or r < 1 or d < 1:
        raise ValueError("need k >= 0, r >= 1, d >= 1")
    if not 0 <= a <= k:
        raise ValueError(f"need 0 <= a <= k, got a = {a}, k = {k}")
    if p ** k * r < 2:
        raise ValueError("the group must have order at least 2")
    if math.gcd(p, r) != 1:
        warnings.warn(f"gcd(p, r) = {math.gcd(p, r)} != 1; decomposition q = p^k r is not coprime",
                      stacklevel=3)


def _finish(theorem, p, k, r, a, d, spec, annihilated) -> PartitionPlan:
    reps = _representatives(spec, annihilated)
    check = _certify(spec, annihilated, reps, d)
    q_prime = len(annihilated)
    n = d * q_prime + spec.order - 1
    if check.n != n:
        raise AssertionError(f"dimension count {check.n} disagrees with {n}")
    if not check.nonzero:
        raise UncertifiablePlanError(check)
    m_prime = sum(is_order_two(spec, e) for e in reps)
    return PartitionPlan(
        theorem=theorem, p=p, k=k, r=r, a=a, d=d, orders=spec.orders, n=n,
        q_prime=q_prime, m=check.m, m_prime=m_prime,
        annihilated=tuple(annihilated), representatives=tuple(reps), check=check,
    )


@lru_cache(maxsize=None)
def plan_orbit_averages(p: int, k: int, r: int, a: int, d: int) -> PartitionPlan:
    """Coset coincidences over H = Z_p^a and transversal averages over Gbar."""
    _validate(p, k, r, d, a)
    spec = GroupSpec((p,) * k + (r,))
    axes = range(a, k + 1)

    def on_axis(e):
        nz = [j for j, b in enumerate(e) if b]
        return len(nz) <= 1 and all(j in axes for j in nz)

    annihilated = [e for e in spec.elements if not on_axis(e)]
    q = spec.order
    q_prime = q - ((k - a) * (p - 1) + r)
    n = (d + 1) * (q - 1) - d * ((k - a) * (p - 1) + r - 1)
    plan = _finish(ORBIT, p, k, r, a, d, spec, annihilated)
    if plan.q_prime != q_prime or plan.n != n:
        raise AssertionError("closed-form counts disagree with the annihilated set")
    if d % 2 == 1 and p == 2:
        expected = 2 ** k - (k - a + 1) if r % 2 else 2 ** (k + 1) - (k - a + 2)
        if plan.m_prime != expected:
            raise AssertionError(f"order-2 count {plan.m_prime} != {expected}")
    return plan


@lru_cache(maxsize=None)
def plan_block_averages(p: int, k: int, r: int, d: int) -> PartitionPlan:
    """Equal averages over the p^k blocks of r consecutive points."""
    _validate(p, k, r, d)
    if k < 1:
        raise ValueError("need k >= 1")
    spec = GroupSpec((p,) * k + (r,))
    annihilated = [e for e in spec.elements if e[-1] == 0 and any(e[:-1])]
    plan = _finish(BLOCK, p, k, r, 0, d, spec, annihilated)
    if plan.n != (d + r) * (p ** k - 1) + r - 1 or plan.q_prime != p ** k - 1:
        raise AssertionError("closed-form counts disagree with the annihilated set")
    return plan


def make_plan(theorem: str, p: int, k: int, r: int, a: int, d: int) -> PartitionPlan:
    if theorem == ORBIT:
        return plan_orbit_averages(p, k, r, a, d)
    if theorem == BLOCK:
        return plan_block_averages(p, k, r, d)
    raise ValueError(f"unknown plan family {theorem!r}")


def _crt(b: int, p: int, c: int, r: int) -> int:
    """The t in [0, p r) with t = b mod p and t = c mod r (gcd(p, r) = 1)."""
    return next(t for t in range(b, p * r, p) if t % r == c)


def point_label(plan: PartitionPlan, g: Sequence[int]) -> int:
    """Label x_label of the point indexed by ``g``.

    Labels are mixed-radix with the H coordinates most significant.  When
    Gbar = Z_p^(k-a) + Z_r with gcd(p, r) = 1 and k > a, the last Z_p
    coordinate and the Z_r coordinate are merged into Z_pr by the Chinese
    remainder map, so that for instance Z_3 + Z_2 is labelled as Z_6.
    Block plans use the plain canonical index.
    """
    spec = plan.spec
    spec.check(g)
    if plan.theorem == BLOCK:
        return spec.index(g)
    p, k, r, a = plan.p, plan.k, plan.r, plan.a
    digits = [(b, p) for b in g[:k]] + [(g[k], r)]
    if k > a and r > 1 and math.gcd(p, r) == 1:
        digits = digits[:k - 1] + [(_crt(g[k - 1], p, g[k], r), p * r)]
    label = 0
    for b, radix in digits:
        label = label * radix + b
    return label


@dataclass(frozen=True)
class OrbitFamily:
    """All transversals of one product subset S = S_{a+1} x ... x S_{k+1}."""

    ell: int
    subset: tuple[tuple[int, ...], ...]
    orbits: tuple[tuple[Element, ...], ...]


@dataclass(frozen=True)
class CoincidenceSchedule:
    cosets: tuple[tuple[Element, ...], ...] = ()
    families: tuple[OrbitFamily, ...] = ()
    blocks: tuple[tuple[Element, ...], ...] = ()

    def families_for(self, ell: int) -> list[OrbitFamily]:
        return [f for f in self.families if f.ell == ell]


def max_orbit_length(plan: PartitionPlan) -> int:
    return min(plan.p, plan.r)


def _transversals(plan: PartitionPlan, subset: Sequence[Sequence[int]]) -> list[tuple[Element, ...]]:
    # graphs of bijections S_{k+1} -> S_j, one per tuple of arrangements
    *heads, last = subset
    orbits = []
    for arrangement in itertools.product(*(itertools.permutations(s) for s in heads)):
        orbit = []
        for t, u in enumerate(last):
            orbit.append((0,) * plan.a + tuple(beta[t] for beta in arrangement) + (u,))
        orbits.append(tuple(sorted(orbit)))
    return orbits


def orbit_families(plan: PartitionPlan, ell: int) -> list[OrbitFamily]:
    coords = range(plan.a, plan.k + 1)
    families = []
    for subset in itertools.product(*(itertools.combinations(range(plan.orders[j]), ell)
                                      for j in coords)):
        families.append(OrbitFamily(ell, tuple(subset), tuple(_transversals(plan, subset))))
    return families


def enumerate_coincidences(plan: PartitionPlan, ell: int | None = None) -> CoincidenceSchedule:
    """Every coincidence the plan forces.

    For orbit plans ``ell`` selects the orbit length (2 <= ell <= min(p, r));
    ``None`` emits all admissible lengths.  Block plans ignore ``ell``.
    Families with a single orbit state no identity and are omitted.
    """
    spec = plan.spec
    if plan.theorem == BLOCK:
        blocks = tuple(tuple(h + (b,) for b in range(plan.r))
                       for h in itertools.product(range(plan.p), repeat=plan.k))
        return CoincidenceSchedule(blocks=blocks)
    top = max_orbit_length(plan)
    if ell is None:
        lengths = range(2, top + 1)
    elif 2 <= ell <= top:
        lengths = [ell]
    else:
        raise ValueError(f"orbit length must lie in [2, {top}], got {ell}")
    hs = list(itertools.product(range(plan.p), repeat=plan.a))
    cosets = []
    for gbar in itertools.product(*(range(q) for q in plan.orders[plan.a:])):
        cosets.append(tuple(spec.reduce(h + gbar) for h in hs))
    # a family holds (ell!)^(k - a) orbits; with k = a each one is a single orbit and asserts nothing
    families = [f for ell_ in lengths for f in orbit_families(plan, ell_)] if plan.k > plan.a else []
    return CoincidenceSchedule(cosets=tuple(cosets), families=tuple(families))


@dataclass(frozen=True)
class ScheduleDeviations:
    """Largest violations, in the max-norm over the d coordinates."""

    coset: float = 0.0
    orbit: float = 0.0
    block: float = 0.0
    orbit_spreads: tuple[float, ...] = ()
    block_averages: np.ndarray | None = field(default=None, compare=False)

    @property
    def worst(self) -> float:
        return max(self.coset, self.orbit, self.block)


def _spread(rows: np.ndarray) -> float:
    if len(rows) < 2:
        return 0.0
    return float(np.max(np.ptp(rows, axis=0)))


def _schedule_layout(schedule: CoincidenceSchedule, spec: GroupSpec):
    # index arrays grouped by shape, built once per (schedule, group)
    cache = schedule.__dict__.setdefault("_layouts", {})
    if spec.orders not in cache:
        idx = spec.index
        cosets: dict[int, list] = {}
        for c in schedule.cosets:
            cosets.setdefault(len(c), []).append([idx(g) for g in c])
        fams: dict[tuple[int, int], list] = {}
        where: dict[tuple[int, int], list] = {}
        for i, fam in enumerate(schedule.families):
            shape = (len(fam.orbits), len(fam.orbits[0]))
            fams.setdefault(shape, []).append([[idx(g) for g in o] for o in fam.orbits])
            where.setdefault(shape, []).append(i)
        shapes = sorted(fams)
        perm = np.array([i for s in shapes for i in where[s]], dtype=np.intp)
        cache[spec.orders] = (
            [np.array(v, dtype=np.intp) for v in cosets.values()],
            [np.array(fams[s], dtype=np.intp) for s in shapes],
            perm,
            np.array([[idx(g) for g in b] for b in schedule.blocks], dtype=np.intp),
        )
    return cache[spec.orders]


def evaluate_schedule(schedule: CoincidenceSchedule, spec: GroupSpec, values: np.ndarray) -> ScheduleDeviations:
    values = np.asarray(values)
    if values.ndim == 1:
        values = values[:, None]
    coset_idx, fam_idx, perm, block_idx = _schedule_layout(schedule, spec)
    coset = 0.0
    for arr in coset_idx:
        rows = values[arr]
        coset = max(coset, float(np.max(np.abs(rows - rows[:, :1]), initial=0.0)))
    spreads = np.zeros(len(perm))
    if len(perm):
        # (families, orbits, orbit length, d) -> spread of the orbit averages per family
        spreads[perm] = np.concatenate([np.ptp(values[arr].mean(axis=2), axis=1).max(axis=1)
                                        for arr in fam_idx])
    block_avgs = None
    block = 0.0
    if schedule.blocks:
        block_avgs = values[block_idx].mean(axis=1)
        block = _spread(block_avgs)
    return ScheduleDeviations(
        coset=coset, orbit=float(spreads.max(initial=0.0)), block=block,
        orbit_spreads=tuple(spreads.tolist()), block_averages=block_avgs,
    )


def identities(plan: PartitionPlan, schedule: CoincidenceSchedule) -> list[str]:
    """Human-readable statements of the schedule in point labels."""
    lab = lambda g: plan.labels[plan.spec.index(g)]
    out = []
    for c in schedule.cosets:
        if len(c) > 1:
            out.append(" = ".join(f"f(x_{lab(g)})" for g in c))
    for fam in schedule.families:
        out.append(" = ".join(
            "Avg(" + ", ".join(f"x_{l}" for l in sorted(lab(g) for g in o)) + ")"
            for o in fam.orbits))
    if schedule.blocks:
        out.append(" = ".join(
            "Avg(" + ", ".join(f"x_{lab(g)}" for g in b) + ")" for b in schedule.blocks))
    return out
