from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gammalab.scalars import (
    ConfigurationError,
    LaurentPoly,
    NotMonomial,
    RationalFnX,
    Scalar,
    as_monomial,
    cyclotomic_field,
    scalar_root_of_unity,
    session_order,
    sqrt_prime_power,
)

K = cyclotomic_field(24)


def test_roots_of_unity():
    assert scalar_root_of_unity(K, 4, 0) == K.one
    assert scalar_root_of_unity(K, 4, 2) == -K.one
    assert scalar_root_of_unity(K, 8, 1) * scalar_root_of_unity(K, 8, 7) == K.one


def test_root_order_must_divide_m():
    with pytest.raises(ConfigurationError):
        scalar_root_of_unity(K, 5, 1)


def test_session_order_contains_required_roots():
    assert session_order(2) == 24
    assert session_order(3) == 72


@pytest.mark.parametrize("q", [2, 3, 4, 9])
def test_sqrt_q_squares_to_q(q):
    F = cyclotomic_field(session_order(q))
    r = sqrt_prime_power(F, q)
    assert r * r == F.rational(q)


def test_text_round_trip():
    x = K.zeta_power(5) * K.rational(Fraction(3, 7)) + K.one
    assert Scalar.from_text(x.to_text()) == x


def test_rational_times_root():
    x = K.zeta_power(21) * K.rational(3)
    assert x.rational_times_root() == (Fraction(3), 21)
    assert x.pretty() == "3*zeta_24^21"


def test_as_monomial():
    f = RationalFnX.monomial(K.rational(5), 3)
    m = as_monomial(f)
    assert (m.coefficient, m.degree) == (K.rational(5), 3)
    g = RationalFnX(LaurentPoly(K, {0: K.one, 1: K.one}))
    assert isinstance(as_monomial(g), NotMonomial)


def test_rational_function_reduces():
    num = LaurentPoly(K, {0: K.one, 1: -K.one})
    f = RationalFnX(num * num, num)
    assert f == RationalFnX(num)


elem = st.builds(lambda e, a, b: K.zeta_power(e) * K.rational(Fraction(a, b)) + K.rational(a),
                 st.integers(0, 23), st.integers(-5, 5), st.integers(1, 4))


@settings(max_examples=60, deadline=None)
@given(elem, elem, elem)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    if not a.is_zero():
        assert a * a.inverse() == K.one
