import math

import numpy as np
import pytest

from avgtverberg.groups import GroupSpec, is_order_two, nonzero_characters
from avgtverberg.obstruction import (
    ExpansionLimitError,
    Mod2Poly,
    QuotientPolyZ,
    RingMismatchError,
    build_chern_poly,
    build_sw_poly,
    complex_check,
    decide_chern,
    decide_sw,
    is_nonzero,
    multiply_reduce,
    orientability,
    real_check,
    split_order_two,
    x_coefficients,
)
from avgtverberg.planner import plan_orbit_averages

# elementary abelian groups for the prime powers
PRIME_POWER_GROUPS = {2: (2,), 3: (3,), 4: (2, 2), 5: (5,), 8: (2, 2, 2), 9: (3, 3)}


def test_multiply_examples():
    y = QuotientPolyZ.linear_form((2,), [1])
    assert (y * y).terms == {(2,): 1}
    assert (QuotientPolyZ.linear_form((2,), [2]) * y).is_zero()
    a = QuotientPolyZ.linear_form((3, 3), [1, 1])
    b = QuotientPolyZ.linear_form((3, 3), [1, -1])
    assert multiply_reduce(a, b).terms == {(2, 0): 1, (0, 2): 2}


def test_ring_mismatch():
    with pytest.raises(RingMismatchError):
        QuotientPolyZ.constant((2,)) * QuotientPolyZ.constant((3,))
    with pytest.raises(RingMismatchError):
        Mod2Poly.one((1,)) + Mod2Poly.one((1, 1))


def test_constant_term_is_integral():
    c = QuotientPolyZ.constant((2, 3), 7)
    assert c.terms == {(0, 0): 7}
    assert (c * c).terms == {(0, 0): 49}


def test_mixed_support_uses_gcd():
    # y1*y2 over (4, 6) lives mod gcd(4, 6) = 2
    p = QuotientPolyZ((4, 6), {(1, 1): 3, (1, 0): 7, (0, 1): 7})
    assert p.terms == {(1, 1): 1, (1, 0): 3, (0, 1): 1}
    assert QuotientPolyZ((3, 4), {(1, 1): 5}).is_zero()


def test_chern_examples():
    assert build_chern_poly((2,), [(1,)], 3).terms == {(3,): 1}
    assert build_chern_poly((6,), [(e,) for e in range(1, 6)], 1).is_zero()
    assert build_chern_poly((3,), [(1,), (2,)], 1).terms == {(2,): 2}
    assert build_chern_poly((5,), [], 2) == QuotientPolyZ.constant((5,))
    with pytest.raises(ValueError):
        build_chern_poly((3,), [(1,)], 0)
    with pytest.raises(ValueError):
        build_chern_poly((3,), [(1, 1)], 1)


def test_sw_examples():
    xy = build_sw_poly((2,), [(1,)], [], 3)
    assert xy.terms == {(1, 1)} and xy.to_text() == "1*x1*y1"
    assert build_sw_poly((4,), [(2,)], [], 3).is_zero()
    assert build_sw_poly((2,), [], [(1,)], 1).terms == {(0, 1)}
    with pytest.raises(ValueError):
        build_sw_poly((2,), [(1,)], [], 2)
    with pytest.raises(ValueError):
        build_sw_poly((4,), [(1,)], [], 1)


def test_x_coefficient_flag():
    assert x_coefficients((4,), (2,)) == [1]
    assert x_coefficients((4,), (2,), literal=True) == [0]
    assert x_coefficients((6, 3), (3, 1)) == [1]
    assert x_coefficients((6, 3), (3, 1), literal=True) == [1]


def test_is_nonzero_examples():
    assert not is_nonzero(QuotientPolyZ((3,)))
    assert not is_nonzero(QuotientPolyZ((6,), {(5,): 120}))
    assert is_nonzero(QuotientPolyZ((5,), {(5,): 24}))
    assert not is_nonzero(Mod2Poly((1,)))


def test_orientability_examples():
    assert orientability((2,), [])
    assert not orientability((2,), [(1,)])
    assert orientability((2,), [(1,), (1,)])
    assert orientability((2, 2), [(1, 0), (0, 1), (1, 1)])
    with pytest.raises(ValueError):
        orientability((4,), [(1,)])


def _random_z(rng, moduli, nterms=4, max_deg=3):
    terms = {}
    for _ in range(nterms):
        mono = tuple(int(a) for a in rng.integers(0, max_deg + 1, len(moduli)))
        terms[mono] = int(rng.integers(-20, 21))
    return QuotientPolyZ(moduli, terms)


def _random_mod2(rng, halves, nterms=4, max_deg=3):
    k = len(halves)
    return Mod2Poly(halves, [tuple(int(a) for a in rng.integers(0, max_deg + 1, 2 * k))
                             for _ in range(nterms)])


@pytest.mark.parametrize("seed", range(5))
def test_ring_axioms_z(seed):
    rng = np.random.default_rng(seed)
    moduli = tuple(int(q) for q in rng.integers(2, 10, int(rng.integers(1, 4))))
    for _ in range(200):
        a, b, c = (_random_z(rng, moduli) for _ in range(3))
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a.normalized() == a and a.normalized().normalized() == a.normalized()


@pytest.mark.parametrize("seed", range(5))
def test_ring_axioms_mod2(seed):
    rng = np.random.default_rng(100 + seed)
    halves = tuple(int(q) // 2 for q in rng.choice([2, 4, 6, 8], int(rng.integers(1, 3))))
    for _ in range(200):
        a, b, c = (_random_mod2(rng, halves) for _ in range(3))
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a.square() == a * a
        assert a ** 5 == a * a * a * a * a
        assert all(x <= 1 for m in a.terms for x in m[:len(halves)])


@pytest.mark.parametrize("q", range(2, 13))
@pytest.mark.parametrize("d", [1, 2, 3])
def test_cyclic_matches_integer_oracle(q, d):
    chars = [(e,) for e in range(1, q)]
    coeff = math.prod(range(1, q)) ** d % q
    expected = QuotientPolyZ((q,), {((q - 1) * d,): coeff})
    assert build_chern_poly((q,), chars, d) == expected


@pytest.mark.parametrize("seed", range(20))
def test_k1_oracle_random_lists(seed):
    rng = np.random.default_rng(seed)
    q = int(rng.integers(2, 10))
    chars = [(int(e),) for e in rng.integers(0, q, int(rng.integers(1, 6)))]
    d = int(rng.integers(1, 4))
    coeff = math.prod(e for (e,) in chars) ** d % q
    expected = QuotientPolyZ((q,), {(len(chars) * d,): coeff})
    assert build_chern_poly((q,), chars, d) == expected


@pytest.mark.parametrize("q", sorted(PRIME_POWER_GROUPS))
@pytest.mark.parametrize("d", [1, 2, 3])
def test_prime_power_positivity(q, d):
    orders = PRIME_POWER_GROUPS[q]
    assert is_nonzero(build_chern_poly(orders, nonzero_characters(GroupSpec(orders)), d))


@pytest.mark.parametrize("orders", [(6,), (2, 3), (12,), (2, 6), (3, 4), (2, 2, 3)])
@pytest.mark.parametrize("d", [1, 2, 3])
def test_first_non_prime_powers_vanish(orders, d):
    assert not is_nonzero(build_chern_poly(orders, nonzero_characters(GroupSpec(orders)), d))


def test_cyclic_prime_powers_can_vanish():
    # the cyclic group Z_4 survives only d = 1, unlike Z_2 + Z_2
    assert is_nonzero(build_chern_poly((4,), [(1,), (2,), (3,)], 1))
    assert not is_nonzero(build_chern_poly((4,), [(1,), (2,), (3,)], 2))
    assert not is_nonzero(build_chern_poly((8,), [(e,) for e in range(1, 8)], 1))


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("k", [0, 1, 2])
@pytest.mark.parametrize("r", [1, 2, 3])
@pytest.mark.parametrize("d", [1, 2, 3])
def test_orbit_plan_positivity(p, k, r, d):
    if p ** k * r < 2:
        pytest.skip("trivial group")
    for a in range(k + 1):
        plan = plan_orbit_averages(p, k, r, a, d)
        assert plan.check.nonzero


def test_checks_report_dimension():
    c = complex_check((3,), [(1,), (2,)], 1)
    assert c.part == "a" and c.n == 2 * 1 * 2 + 2
    r = real_check((2, 2), [(1, 0), (0, 1), (1, 1)], 1)
    assert r.part == "b" and r.m_prime == 3 and r.n == 1 * 3 + 3
    assert r.orientable


def test_golden_text():
    h = build_chern_poly((3, 3), [(1, 1), (1, 2)], 1)
    assert h.to_text() == "1*y1^2 + 2*y2^2"
    assert QuotientPolyZ((5,)).to_text() == "0"
    g = build_sw_poly((2, 2), [(1, 0), (1, 1)], [], 1)
    assert g.to_text() == "1*x1*x2 + 1*y1"
    assert build_chern_poly((2,), [(1,)], 2).to_text() == "1*y1^2"


def _random_chars(rng, spec, count):
    return [spec.element(int(i)) for i in rng.integers(0, spec.order, count)]


@pytest.mark.parametrize("seed", range(300))
def test_fast_chern_decision_matches_expansion(seed):
    rng = np.random.default_rng(seed)
    orders = tuple(int(q) for q in rng.choice([2, 3, 4, 5, 6, 8, 9, 12], int(rng.integers(1, 4))))
    spec = GroupSpec(orders)
    chars = _random_chars(rng, spec, int(rng.integers(0, 6)))
    d = int(rng.integers(1, 4))
    assert decide_chern(orders, chars, d) == is_nonzero(build_chern_poly(orders, chars, d))


@pytest.mark.parametrize("seed", range(300))
def test_fast_sw_decision_matches_expansion(seed):
    rng = np.random.default_rng(1000 + seed)
    orders = tuple(int(q) for q in rng.choice([2, 3, 4, 6, 8, 12], int(rng.integers(1, 4))))
    spec = GroupSpec(orders)
    if not any(q % 2 == 0 for q in orders):
        pytest.skip("no even factor")
    order2 = [e for e in spec.elements if is_order_two(spec, e)]
    o2 = [order2[int(i)] for i in rng.integers(0, len(order2), int(rng.integers(0, 5)))]
    rest = split_order_two(spec, _random_chars(rng, spec, int(rng.integers(0, 4))))[1]
    d = int(rng.choice([1, 3, 5]))
    literal = bool(rng.integers(0, 2))
    expected = is_nonzero(build_sw_poly(orders, o2, rest, d, literal))
    assert decide_sw(orders, o2, rest, d, literal) == expected


def test_checks_expand_lazily():
    spec = GroupSpec((2, 2, 2, 2, 2))
    check = real_check(spec.orders, spec.elements[1:], 3)
    assert check.nonzero
    assert check.polynomial_text(max_terms=100) is None
    with pytest.raises(ExpansionLimitError):
        check.expand(max_terms=100)
    small = complex_check((3,), [(1,), (2,)], 1)
    assert small.polynomial_text() == "2*y1^2"
    assert small.polynomial == build_chern_poly((3,), [(1,), (2,)], 1)
