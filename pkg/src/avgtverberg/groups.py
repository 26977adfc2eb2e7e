"""Finite abelian groups Z_{q_1} + ... + Z_{q_k} and their characters.

Elements and characters are plain tuples of integers.  Characters are
evaluated exactly as an integer exponent ``t`` modulo the group exponent
``L = lcm(q_j)``; the complex value ``exp(2*pi*i*t/L)`` is derived only
when asked for.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

Element = tuple[int, ...]
Character = tuple[int, ...]


@dataclass(frozen=True)
class GroupSpec:
    """The group Z_{q_1} + ... + Z_{q_k}.  Factors of order 1 are allowed."""

    orders: tuple[int, ...]

    def __post_init__(self):
        orders = tuple(int(q) for q in self.orders)
        if not orders:
            raise ValueError("a group needs at least one factor")
        if any(q < 1 for q in orders):
            raise ValueError(f"factor orders must be positive, got {orders}")
        object.__setattr__(self, "orders", orders)

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def order(self) -> int:
        return math.prod(self.orders)

    @property
    def exponent(self) -> int:
        return math.lcm(*self.orders)

    @cached_property
    def elements(self) -> list[Element]:
        return enumerate_elements(self)

    @cached_property
    def _weights(self) -> tuple[int, ...]:
        w, out = 1, []
        for q in reversed(self.orders):
            out.append(w)
            w *= q
        return tuple(reversed(out))

    def index(self, g: Sequence[int]) -> int:
        """Position of ``g`` in the canonical (lexicographic) ordering."""
        self.check(g)
        return sum(b * w for b, w in zip(g, self._weights))

    def element(self, index: int) -> Element:
        return self.elements[index]

    def check(self, g: Sequence[int]) -> None:
        if len(g) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates, got {len(g)}")
        for b, q in zip(g, self.orders):
            if not 0 <= b < q:
                raise ValueError(f"coordinate {b} out of range for Z_{q}")

    def reduce(self, g: Sequence[int]) -> Element:
        if len(g) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates, got {len(g)}")
        return tuple(int(b) % q for b, q in zip(g, self.orders))

    def add(self, g: Sequence[int], h: Sequence[int]) -> Element:
        return self.reduce([a + b for a, b in zip(g, h)])

    def neg(self, g: Sequence[int]) -> Element:
        return self.reduce([-b for b in g])

    def scale(self, t: int, g: Sequence[int]) -> Element:
        return self.reduce([t * b for b in g])

    @property
    def identity(self) -> Element:
        return (0,) * self.rank

    @cached_property
    def exponent_table(self) -> np.ndarray:
        """``T[e, g]`` = exponent of chi_e(g) modulo L, rows/columns canonical."""
        L = self.exponent
        E = np.array(self.elements, dtype=np.int64).reshape(self.order, self.rank)
        scale = np.array([L // q for q in self.orders], dtype=np.int64)
        return ((E * scale) @ E.T) % L

    @cached_property
    def character_table(self) -> np.ndarray:
        """``X[e, g]`` = chi_e(g) as complex numbers."""
        return np.exp(2j * np.pi * self.exponent_table / self.exponent)


def enumerate_elements(spec: GroupSpec) -> list[Element]:
    """All elements in lexicographic order; the identity comes first."""
    return [tuple(g) for g in itertools.product(*(range(q) for q in spec.orders))]


def character_exponent(spec: GroupSpec, eps: Sequence[int], g: Sequence[int]) -> int:
    if len(eps) != spec.rank or len(g) != spec.rank:
        raise ValueError(
            f"dimension mismatch: group rank {spec.rank}, "
            f"character {len(eps)}, element {len(g)}"
        )
    L = spec.exponent
    return sum(e * b * (L // q) for e, b, q in zip(eps, g, spec.orders)) % L


def eval_character(spec: GroupSpec, eps: Sequence[int], g: Sequence[int]) -> tuple[int, complex]:
    """Return ``(t, value)`` with chi_eps(g) = exp(2 pi i t / L)."""
    t = character_exponent(spec, eps, g)
    return t, root_of_unity(t, spec.exponent)


def root_of_unity(t: int, L: int) -> complex:
    t %= L
    # exact values at the quarter turns keep +-1, +-i free of rounding noise
    if (4 * t) % L == 0:
        return (1, 1j, -1, -1j)[(4 * t) // L]
    return complex(np.exp(2j * np.pi * t / L))


def element_order(spec: GroupSpec, eps: Sequence[int]) -> int:
    """Smallest t >= 1 with t * eps = 0."""
    return math.lcm(*(q // math.gcd(q, e) for e, q in zip(eps, spec.orders)))


def is_order_two(spec: GroupSpec, eps: Sequence[int]) -> bool:
    return element_order(spec, eps) == 2


def is_real_character(spec: GroupSpec, eps: Sequence[int]) -> bool:
    """chi_eps is real-valued iff eps = -eps, i.e. eps has order 1 or 2."""
    return element_order(spec, eps) <= 2


def nonzero_characters(spec: GroupSpec) -> list[Character]:
    return spec.elements[1:]
