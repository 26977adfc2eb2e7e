"""Obstruction polynomials in the two quotient rings.

``QuotientPolyZ`` lives in Z[y_1..y_k]/(q_1 y_1, ..., q_k y_k).  Its normal
form stores, for every monomial with variable support J, a coefficient
modulo gcd{q_j : j in J}; the constant term is an ordinary integer.

``Mod2Poly`` lives in Z_2[x_1, y_1, ..., x_k', y_k']/(x_i^2 - r_i y_i),
one pair (x_i, y_i) for each even factor q_i = 2 r_i.  Normal form keeps
every x-exponent in {0, 1} by rewriting x_i^2 -> (r_i mod 2) y_i.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from .groups import Character, GroupSpec, is_order_two

Monomial = tuple[int, ...]


class RingMismatchError(ValueError):
    pass


@lru_cache(maxsize=None)
def _support_modulus(moduli: tuple[int, ...], support: tuple[bool, ...]) -> int:
    g = 0
    for q, used in zip(moduli, support):
        if used:
            g = math.gcd(g, q)
    return g  # 0 for the constant monomial: no reduction


def _modulus(moduli: tuple[int, ...], mono: Monomial) -> int:
    return _support_modulus(moduli, tuple(a > 0 for a in mono))


def _monomial_text(names: Sequence[str], mono: Monomial) -> str:
    parts = [n if a == 1 else f"{n}^{a}" for n, a in zip(names, mono) if a]
    return "*".join(parts)


def _poly_text(names: Sequence[str], terms: dict[Monomial, int]) -> str:
    if not terms:
        return "0"
    out = []
    for mono in sorted(terms, key=lambda m: (-sum(m), tuple(-a for a in m))):
        c = terms[mono]
        body = _monomial_text(names, mono)
        out.append(f"{c}*{body}" if body else f"{c}")
    return " + ".join(out)


class QuotientPolyZ:
    """Element of Z[y]/(q_1 y_1, ..., q_k y_k) in normal form."""

    __slots__ = ("moduli", "terms")

    def __init__(self, moduli: Sequence[int], terms: dict[Monomial, int] | None = None):
        self.moduli = tuple(int(q) for q in moduli)
        if any(q < 1 for q in self.moduli):
            raise ValueError(f"moduli must be positive, got {self.moduli}")
        self.terms = self._normalize(terms or {})

    def _normalize(self, terms: dict[Monomial, int]) -> dict[Monomial, int]:
        out = {}
        k = len(self.moduli)
        for mono, c in terms.items():
            if len(mono) != k or any(a < 0 for a in mono):
                raise ValueError(f"bad exponent vector {mono} for {k} variables")
            g = _modulus(self.moduli, mono)
            if g:
                c %= g
            if c:
                out[tuple(mono)] = int(c)
        return out

    @classmethod
    def constant(cls, moduli: Sequence[int], c: int = 1) -> "QuotientPolyZ":
        return cls(moduli, {(0,) * len(moduli): c})

    @classmethod
    def linear_form(cls, moduli: Sequence[int], coeffs: Sequence[int]) -> "QuotientPolyZ":
        k = len(moduli)
        terms = {}
        for j, c in enumerate(coeffs):
            mono = tuple(1 if i == j else 0 for i in range(k))
            terms[mono] = c
        return cls(moduli, terms)

    def _check(self, other: "QuotientPolyZ") -> None:
        if not isinstance(other, QuotientPolyZ) or other.moduli != self.moduli:
            raise RingMismatchError("polynomials live in different rings")

    def __add__(self, other):
        self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return QuotientPolyZ(self.moduli, terms)

    def __neg__(self):
        return QuotientPolyZ(self.moduli, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        return multiply_reduce(self, other)

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        result = QuotientPolyZ.constant(self.moduli)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        return (
            isinstance(other, QuotientPolyZ)
            and other.moduli == self.moduli
            and other.terms == self.terms
        )

    def __hash__(self):
        return hash((self.moduli, frozenset(self.terms.items())))

    def normalized(self) -> "QuotientPolyZ":
        return QuotientPolyZ(self.moduli, self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def to_text(self) -> str:
        names = [f"y{j + 1}" for j in range(len(self.moduli))]
        return _poly_text(names, self.terms)

    def __repr__(self):
        return f"QuotientPolyZ({self.moduli}, {self.to_text()})"


def multiply_reduce(p1: QuotientPolyZ, p2: QuotientPolyZ) -> QuotientPolyZ:
    p1._check(p2)
    moduli = p1.moduli
    acc: dict[Monomial, int] = {}
    for m1, c1 in p1.terms.items():
        for m2, c2 in p2.terms.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            acc[m] = acc.get(m, 0) + c1 * c2
    out = QuotientPolyZ(moduli)
    out.terms = out._normalize(acc)
    return out


class Mod2Poly:
    """Element of Z_2[x, y]/(x_i^2 - r_i y_i); monomials are (x..., y...) tuples."""

    __slots__ = ("half_orders", "terms")

    def __init__(self, half_orders: Sequence[int], terms: Iterable[Monomial] = ()):
        self.half_orders = tuple(int(r) for r in half_orders)
        acc: set[Monomial] = set()
        for mono in terms:
            reduced = self._reduce_monomial(tuple(mono))
            if reduced is not None:
                acc ^= {reduced}
        self.terms = frozenset(acc)

    @property
    def nvars(self) -> int:
        return len(self.half_orders)

    def _reduce_monomial(self, mono: Monomial) -> Monomial | None:
        k = self.nvars
        if len(mono) != 2 * k:
            raise ValueError(f"expected {2 * k} exponents, got {len(mono)}")
        xs, ys = list(mono[:k]), list(mono[k:])
        for i, r in enumerate(self.half_orders):
            if xs[i] >= 2:
                if r % 2 == 0:
                    return None
                ys[i] += xs[i] // 2
                xs[i] %= 2
        return tuple(xs) + tuple(ys)

    @classmethod
    def one(cls, half_orders: Sequence[int]) -> "Mod2Poly":
        return cls(half_orders, [(0,) * (2 * len(half_orders))])

    @classmethod
    def x_form(cls, half_orders: Sequence[int], coeffs: Sequence[int]) -> "Mod2Poly":
        k = len(half_orders)
        return cls(half_orders, [tuple(int(i == j) for i in range(2 * k))
                                 for j, c in enumerate(coeffs) if c % 2])

    @classmethod
    def y_form(cls, half_orders: Sequence[int], coeffs: Sequence[int]) -> "Mod2Poly":
        k = len(half_orders)
        return cls(half_orders, [tuple(int(i == k + j) for i in range(2 * k))
                                 for j, c in enumerate(coeffs) if c % 2])

    def _check(self, other):
        if not isinstance(other, Mod2Poly) or other.half_orders != self.half_orders:
            raise RingMismatchError("polynomials live in different rings")

    def __add__(self, other):
        self._check(other)
        return Mod2Poly(self.half_orders, self.terms ^ other.terms)

    def __mul__(self, other):
        self._check(other)
        acc: set[Monomial] = set()
        for m1 in self.terms:
            for m2 in other.terms:
                m = self._reduce_monomial(tuple(a + b for a, b in zip(m1, m2)))
                if m is not None:
                    acc ^= {m}
        out = Mod2Poly(self.half_orders)
        out.terms = frozenset(acc)
        return out

    def square(self) -> "Mod2Poly":
        # Frobenius: cross terms cancel in characteristic 2
        return Mod2Poly(self.half_orders, [tuple(2 * a for a in m) for m in self.terms])

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        result = Mod2Poly.one(self.half_orders)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base.square()
        return result

    def __eq__(self, other):
        return (
            isinstance(other, Mod2Poly)
            and other.half_orders == self.half_orders
            and other.terms == self.terms
        )

    def __hash__(self):
        return hash((self.half_orders, self.terms))

    def is_zero(self) -> bool:
        return not self.terms

    def to_text(self) -> str:
        k = self.nvars
        names = [f"x{i + 1}" for i in range(k)] + [f"y{i + 1}" for i in range(k)]
        return _poly_text(names, {m: 1 for m in self.terms})

    def __repr__(self):
        return f"Mod2Poly({self.half_orders}, {self.to_text()})"


class ExpansionLimitError(RuntimeError):
    """Raised when a product grows past the requested number of terms."""


def is_nonzero(h: QuotientPolyZ | Mod2Poly) -> bool:
    return not h.is_zero()


def _product(h, factors, d: int, max_terms: int | None):
    for form in factors:
        if max_terms is None:
            h = h * form ** d
            continue
        for _ in range(d):
            h = h * form
            if len(h.terms) > max_terms:
                raise ExpansionLimitError(f"product exceeds {max_terms} terms")
    return h


def build_chern_poly(moduli: Sequence[int], eps_list: Iterable[Character], d: int,
                     max_terms: int | None = None) -> QuotientPolyZ:
    """prod_j (eps_j . y)^d, reduced after every multiplication."""
    if d < 1:
        raise ValueError("d must be positive")
    moduli = tuple(moduli)
    spec = GroupSpec(moduli)
    forms = []
    for eps in eps_list:
        spec.check(eps)
        forms.append(QuotientPolyZ.linear_form(moduli, eps))
    return _product(QuotientPolyZ.constant(moduli), forms, d, max_terms)


def _prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def _valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def decide_chern(moduli: Sequence[int], eps_list: Iterable[Character], d: int) -> bool:
    """Exact non-vanishing test for :func:`build_chern_poly` without full expansion.

    A positive-degree coefficient on support J lives in Z/gcd(q_J), which
    splits over the primes l dividing some q_j.  In the l-component every
    variable with l not dividing q_j dies.  If the survivors all have
    l || q_j the component is the domain F_l[y], where a product is nonzero
    iff each factor is.  One surviving variable gives a plain integer
    product; anything else falls back to expanding the l-component.
    """
    if d < 1:
        raise ValueError("d must be positive")
    moduli = tuple(moduli)
    spec = GroupSpec(moduli)
    eps_list = [tuple(e) for e in eps_list]
    for e in eps_list:
        spec.check(e)
    if not eps_list:
        return True
    primes = sorted({l for q in moduli for l in _prime_factors(q)})
    for l in primes:
        coords = [j for j, q in enumerate(moduli) if q % l == 0]
        sub = tuple(l ** _valuation(moduli[j], l) for j in coords)
        forms = [tuple(e[j] % m for j, m in zip(coords, sub)) for e in eps_list]
        if len(coords) == 1:
            if math.prod(f[0] for f in forms) ** d % sub[0]:
                return True
        elif all(m == l for m in sub):
            if all(any(f) for f in forms):
                return True
        elif is_nonzero(build_chern_poly(sub, forms, d)):
            return True
    return False


def even_factors(orders: Sequence[int]) -> list[int]:
    return [i for i, q in enumerate(orders) if q % 2 == 0]


def x_coefficients(orders: Sequence[int], eps: Sequence[int], literal: bool = False) -> list[int]:
    """Coefficients of the x-variables in w_1 of a real character.

    By default the coefficient on factor Z_{2r} is 1 iff eps_i = r, which is
    the class of the sign character; ``literal`` uses eps_i mod 2 instead.
    """
    out = []
    for i in even_factors(orders):
        r = orders[i] // 2
        out.append(int(eps[i] % 2) if literal else int(eps[i] == r))
    return out


def _sw_forms(orders, eps_order2, eps_rest, literal):
    spec = GroupSpec(orders)
    evens = even_factors(spec.orders)
    xs, ys = [], []
    for eps in eps_order2:
        spec.check(eps)
        if not is_order_two(spec, eps):
            raise ValueError(f"character {eps} does not have order 2")
        xs.append(x_coefficients(spec.orders, eps, literal))
    for eps in eps_rest:
        spec.check(eps)
        ys.append([eps[i] % 2 for i in evens])
    return [spec.orders[i] // 2 for i in evens], xs, ys


def build_sw_poly(
    orders: Sequence[int],
    eps_order2: Iterable[Character],
    eps_rest: Iterable[Character],
    d: int,
    literal: bool = False,
    max_terms: int | None = None,
) -> Mod2Poly:
    """prod (x-form)^d over order-2 characters times prod (y-form)^d over the rest."""
    if d < 1 or d % 2 == 0:
        raise ValueError("the mod 2 class is only defined here for odd d")
    half, xs, ys = _sw_forms(orders, eps_order2, eps_rest, literal)
    forms = [Mod2Poly.x_form(half, c) for c in xs] + [Mod2Poly.y_form(half, c) for c in ys]
    return _product(Mod2Poly.one(half), forms, d, max_terms)


def decide_sw(
    orders: Sequence[int],
    eps_order2: Iterable[Character],
    eps_rest: Iterable[Character],
    d: int,
    literal: bool = False,
) -> bool:
    """Exact non-vanishing test for :func:`build_sw_poly` without full expansion.

    Eliminating y_i = x_i^2 for odd r_i leaves S[x_e]/(x_e^2) with S the
    polynomial domain in the odd-r x's and all even-r y's, and x_e the
    nilpotent x-variables of even r_i.  Write each factor as A + B with
    A in S and B in the span of the x_e.  If every A is nonzero the
    x_e-free part prod A^d is nonzero.  Otherwise B^2 = 0 kills the product
    for d >= 3, and for d = 1 it survives iff the product of the pure-B
    factors is nonzero in the exterior-like algebra of the x_e.
    """
    if d < 1 or d % 2 == 0:
        raise ValueError("the mod 2 class is only defined here for odd d")
    half, xs, ys = _sw_forms(orders, eps_order2, eps_rest, literal)
    odd = [i for i, r in enumerate(half) if r % 2]
    nil = [i for i, r in enumerate(half) if r % 2 == 0]
    if not all(any(c % 2 for c in y) for y in ys):
        return False
    pure_b = []
    for c in xs:
        if any(c[i] % 2 for i in odd):
            continue
        b = frozenset(i for i in nil if c[i] % 2)
        if not b:
            return False
        pure_b.append(b)
    if not pure_b:
        return True
    if d >= 3:
        return False
    # multiply the pure-B factors over F_2 with x_e^2 = 0
    acc = {frozenset()}
    for b in pure_b:
        nxt: set[frozenset] = set()
        for mono in acc:
            for i in b:
                if i not in mono:
                    nxt ^= {mono | {i}}
        acc = nxt
        if not acc:
            return False
    return True


def orientability(orders: Sequence[int], eps_order2: Iterable[Character]) -> bool:
    """True iff the sum of the order-2 classes is zero in every even coordinate."""
    spec = GroupSpec(orders)
    totals = [0] * len(even_factors(spec.orders))
    for eps in eps_order2:
        spec.check(eps)
        if not is_order_two(spec, eps):
            raise ValueError(f"character {eps} does not have order 2")
        for j, c in enumerate(x_coefficients(spec.orders, eps)):
            totals[j] += c
    return all(t % 2 == 0 for t in totals)


TEXT_TERM_LIMIT = 5000


@dataclass(frozen=True)
class ObstructionCheck:
    """Verdict of one of the two polynomial criteria.

    ``nonzero`` comes from the exact decision procedures; the polynomial
    itself is expanded only on demand.
    """

    part: str  # "a": complex criterion, "b": mod 2 criterion
    d: int
    m: int
    m_prime: int
    q: int
    nonzero: bool
    orders: tuple[int, ...]
    characters: tuple[Character, ...]
    orientable: bool | None = None
    literal: bool = False

    def expand(self, max_terms: int | None = None) -> QuotientPolyZ | Mod2Poly:
        if self.part == "a":
            return build_chern_poly(self.orders, self.characters, self.d, max_terms)
        order2, rest = split_order_two(GroupSpec(self.orders), self.characters)
        return build_sw_poly(self.orders, order2, rest, self.d, self.literal, max_terms)

    @cached_property
    def polynomial(self) -> QuotientPolyZ | Mod2Poly:
        return self.expand()

    def polynomial_text(self, max_terms: int = TEXT_TERM_LIMIT) -> str | None:
        """Canonical text of the polynomial, or None if it exceeds ``max_terms``."""
        try:
            return self.expand(max_terms).to_text()
        except ExpansionLimitError:
            return None

    @property
    def n(self) -> int:
        """Simplex dimension at which the criterion applies."""
        if self.part == "a":
            return 2 * self.d * self.m + self.q - 1
        return self.d * (2 * self.m - self.m_prime) + self.q - 1


def complex_check(orders: Sequence[int], chars: Sequence[Character], d: int) -> ObstructionCheck:
    """Criterion for maps into C^d annihilating c_{i, eps} for all listed eps."""
    spec = GroupSpec(orders)
    chars = tuple(tuple(e) for e in chars)
    return ObstructionCheck("a", d, len(chars), 0, spec.order, decide_chern(spec.orders, chars, d),
                            spec.orders, chars)


def split_order_two(spec: GroupSpec, chars: Iterable[Character]) -> tuple[list[Character], list[Character]]:
    order2, rest = [], []
    for e in chars:
        (order2 if is_order_two(spec, e) else rest).append(tuple(e))
    return order2, rest


def real_check(
    orders: Sequence[int], chars: Sequence[Character], d: int, literal: bool = False
) -> ObstructionCheck:
    """Mod 2 criterion for maps into R^d, d odd, annihilating c_{+-eps}."""
    spec = GroupSpec(orders)
    order2, rest = split_order_two(spec, chars)
    return ObstructionCheck(
        "b", d, len(order2) + len(rest), len(order2), spec.order,
        decide_sw(spec.orders, order2, rest, d, literal), spec.orders, tuple(order2 + rest),
        orientable=orientability(spec.orders, order2), literal=literal,
    )
