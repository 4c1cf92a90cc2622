from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudobosons.scalar import (
    InverseOfSumError,
    RadScalar,
    ScalarError,
    as_fraction,
    parse_rational,
    squarefree_split,
)

from strategies import nonzero_fractions, rad_scalars

ONE = RadScalar.from_rational(1)


def test_perfect_square_roots_collapse():
    assert RadScalar.sqrt(4) * RadScalar.sqrt(4) == 4
    assert RadScalar.sqrt(9) == 3
    assert RadScalar.sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert RadScalar.sqrt(8) == RadScalar.sqrt(2) * 2


def test_sqrt_omega_over_pi_squared():
    s = RadScalar.sqrt(3) * RadScalar.pi_power(-1)
    assert (s * s).terms == {(1, -2): Fraction(3)}


def test_pi_powers_cancel():
    assert RadScalar.pi_power(1) * RadScalar.pi_power(-1) == ONE


def test_repeated_sum_matches_scaling():
    w = RadScalar.sqrt(5)
    assert w + w == w * 2


def test_distinct_pi_powers_do_not_merge():
    a = RadScalar.pi_power(1) + RadScalar.pi_power(2)
    assert len(a.terms) == 2
    assert a != RadScalar.pi_power(3)


def test_rendering():
    assert str(RadScalar.sqrt(2) * RadScalar.pi_power(-1)) == "sqrt(2)*pi^(-1/2)"
    assert str(RadScalar.pi_power(2, 3) - RadScalar.sqrt(2) * 2) == "3*pi - 2*sqrt(2)"
    assert str(RadScalar.pi_power(-3, 2)) == "2*pi^(-3/2)"
    assert str(RadScalar()) == "0"
    assert str(RadScalar.from_rational(Fraction(-1, 3))) == "-1/3"


def test_inverse_of_single_term():
    a = RadScalar.sqrt(6) * RadScalar.pi_power(3, Fraction(2, 7))
    assert a * a.inverse() == ONE


def test_inverse_of_sum_is_refused():
    with pytest.raises(InverseOfSumError):
        (ONE + RadScalar.sqrt(2)).inverse()
    with pytest.raises(ZeroDivisionError):
        RadScalar().inverse()


def test_negative_sqrt_rejected():
    with pytest.raises(ScalarError):
        RadScalar.sqrt(-1)


def test_sign_of_sums():
    assert (RadScalar.sqrt(2) - Fraction(141, 100)).sign() == 1
    assert (RadScalar.sqrt(2) - Fraction(142, 100)).sign() == -1
    assert (RadScalar.pi_power(2) - Fraction(22, 7)).sign() == -1
    assert RadScalar().sign() == 0


def test_float_conversion():
    assert float(RadScalar.sqrt(2) * RadScalar.pi_power(1)) == pytest.approx(2.5066282746310002)


def test_parse_rational():
    assert parse_rational("3/2") == Fraction(3, 2)
    assert parse_rational(" -7 ") == -7
    for bad in ("1.5", "1e3", "", "a/b", "1/0"):
        with pytest.raises(ValueError):
            parse_rational(bad)
    with pytest.raises(TypeError):
        as_fraction(0.5)


@given(st.integers(1, 10**6))
def test_squarefree_split(n):
    s, r = squarefree_split(n)
    assert s * s * r == n
    assert all(r % (p * p) for p in range(2, int(r**0.5) + 1))


@settings(max_examples=1000)
@given(rad_scalars(), rad_scalars(), rad_scalars())
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert a * b == b * a
    assert a + (-a) == RadScalar()
    assert a * ONE == a


@given(rad_scalars())
def test_canonical_form_is_idempotent(a):
    again = RadScalar(a.terms) + RadScalar()
    assert again == a and hash(again) == hash(a)
    assert all(c != 0 for c in a.terms.values())


@given(rad_scalars(), nonzero_fractions)
def test_float_is_a_homomorphism(a, q):
    assert float(a * q) == pytest.approx(float(a) * float(q), rel=1e-12, abs=1e-12)


@given(nonzero_fractions.map(abs))
def test_perfect_squares_become_rational(q):
    s = RadScalar.sqrt(q * q)
    assert s.is_rational() and s.to_fraction() == q
