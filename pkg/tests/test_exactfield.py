import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fuchsian_codes.errors import NotAUnitMultiple, PellBoundExceeded
from fuchsian_codes.exactfield import (
    QuadElement,
    TowerElement,
    galois_conjugate,
    is_squarefree,
    pell_fundamental_unit,
    unit_log,
    unit_power,
)

EPS3 = QuadElement(3, 2, 1)
small = st.fractions(min_value=-50, max_value=50, max_denominator=20)


def brute_pell(d, limit=10**6):
    for b in range(1, limit):
        a2 = 1 + d * b * b
        a = math.isqrt(a2)
        if a * a == a2:
            return a, b
    raise AssertionError("no solution in range")


def test_conjugate_examples():
    x = galois_conjugate(EPS3)
    assert x == QuadElement(3, 2, -1)
    assert (EPS3 * x) == QuadElement(3, 1, 0)
    assert galois_conjugate(QuadElement(3, 5)) == QuadElement(3, 5)
    y = QuadElement(2, 3, 2)
    assert y * galois_conjugate(y) == QuadElement(2, 1)


def test_conjugate_involution_and_rational_norm():
    x = QuadElement(7, Fraction(3, 4), Fraction(-5, 2))
    assert galois_conjugate(galois_conjugate(x)) == x
    assert (x * galois_conjugate(x)).is_rational()


@pytest.mark.parametrize("d,want", [(3, (2, 1)), (2, (3, 2)), (6, (5, 2))])
def test_pell_examples(d, want):
    eps = pell_fundamental_unit(d)
    assert (eps.p, eps.q) == want


@pytest.mark.parametrize("d", [2, 3, 5, 6, 7, 10])
def test_pell_matches_brute_force(d):
    eps = pell_fundamental_unit(d)
    assert (eps.p, eps.q) == brute_pell(d)


def test_pell_large_and_norm_minus_one_case():
    eps = pell_fundamental_unit(13)
    assert (eps.p, eps.q) == (649, 180)
    assert eps.norm() == 1
    eps = pell_fundamental_unit(61)
    assert eps.norm() == 1 and eps.p == 1766319049


def test_pell_rejects_bad_input():
    with pytest.raises(ValueError):
        pell_fundamental_unit(4)
    with pytest.raises(ValueError):
        pell_fundamental_unit(1)
    with pytest.raises(PellBoundExceeded):
        pell_fundamental_unit(61, max_bits=8)


def test_squarefree():
    assert [n for n in range(2, 13) if is_squarefree(n)] == [2, 3, 5, 6, 7, 10, 11]


def test_unit_power_examples():
    assert unit_power(EPS3, 2) == QuadElement(3, 7, 4)
    assert unit_power(EPS3, 0) == QuadElement(3, 1)
    assert unit_power(EPS3, -1) == QuadElement(3, 2, -1)


@given(st.integers(-30, 30), st.integers(-30, 30))
def test_unit_power_adds_exponents(m, n):
    assert unit_power(EPS3, m) * unit_power(EPS3, n) == unit_power(EPS3, m + n)


@pytest.mark.parametrize("k", range(31))
def test_unit_log_inverts_power(k):
    assert unit_log(unit_power(EPS3, k), EPS3) == k


def test_unit_log_examples():
    assert unit_log(QuadElement(3, 7, 4), EPS3) == 2
    assert unit_log(QuadElement(3, 1), EPS3) == 0
    assert unit_log(QuadElement(3, 4, 2), EPS3) == 1
    assert unit_log(unit_power(EPS3, -300), EPS3) == -300
    assert unit_log(unit_power(EPS3, 3000), EPS3) == 3000


def test_unit_log_rejects_non_units():
    with pytest.raises(NotAUnitMultiple):
        unit_log(QuadElement(3, 1, 1), EPS3)
    with pytest.raises(NotAUnitMultiple):
        unit_log(QuadElement(3, 0), EPS3)


@given(small, small, small, small)
def test_norm_is_multiplicative(a, b, c, d):
    x, y = QuadElement(6, a, b), QuadElement(6, c, d)
    assert (x * y).norm() == x.norm() * y.norm()


@given(small, small)
def test_quad_float_and_sign(p, q):
    x = QuadElement(3, p, q)
    exact = float(p) + float(q) * math.sqrt(3)
    assert float(x) == pytest.approx(exact, rel=1e-9, abs=1e-9)
    if abs(exact) > 1e-9:
        assert x.sign() == (1 if exact > 0 else -1)


def test_quad_float_cancellation():
    # (2 - sqrt3)^20 is tiny; naive evaluation loses every digit
    x = unit_power(EPS3, -20)
    assert float(x) == pytest.approx((2 - math.sqrt(3)) ** 20, rel=1e-12)


towers = st.builds(TowerElement, small, small, small, small)


@settings(max_examples=60)
@given(towers, towers, towers)
def test_tower_ring_axioms(x, y, z):
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + y == y + x
    assert x * y == y * x


@given(towers)
def test_tower_inverse(x):
    if x.is_zero():
        return
    assert x * x.inverse() == TowerElement(1)


@given(towers)
def test_tower_float_within_tolerance(x):
    r2, r3 = math.sqrt(2), math.sqrt(3)
    approx = float(x.c1) + float(x.c2) * r2 + float(x.c3) * r3 + float(x.c6) * r2 * r3
    scale = sum(abs(float(c)) for c in x.coefficients()) or 1.0
    assert abs(float(x) - approx) <= 1e-12 * scale


def test_tower_sign_exact_near_zero():
    # 5 sqrt2 - 7 and 7 - 5 sqrt2 are close to zero
    assert TowerElement(-7, 5).sign() == 1
    assert TowerElement(7, -5).sign() == -1
    x = TowerElement(1, 1, 1, 1)
    assert x.sign() == 1
    assert (x - x).sign() == 0


def test_tower_embeds_quad_exactly():
    for d in (2, 3, 6):
        x = QuadElement(d, Fraction(1, 3), 2)
        y = QuadElement(d, -4, Fraction(5, 7))
        assert TowerElement.from_quad(x * y) == TowerElement.from_quad(x) * TowerElement.from_quad(y)
    with pytest.raises(ValueError):
        TowerElement.from_quad(QuadElement(5, 1, 1))


def test_tower_parse():
    assert TowerElement.parse("0 1/2 0 1/2") == TowerElement(0, Fraction(1, 2), 0, Fraction(1, 2))
    with pytest.raises(ValueError):
        TowerElement.parse("1 2")
