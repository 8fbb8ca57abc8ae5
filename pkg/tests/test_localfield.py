import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gammalab.localfield import (
    AbovePrecision,
    DomainError,
    FieldElem,
    LocalField,
    PrecisionError,
    QuadraticExtension,
    finite_field,
    irreducible_quadratics,
    is_irreducible_quadratic,
)

F3 = LocalField(3, 6)
k3 = F3.k
t = F3.uniformizer(1)


def test_valuation_examples():
    assert (t * t + t * t * t).val() == 2
    assert F3.zero(6).val() == AbovePrecision(6)
    assert (F3.one() + t).inverse().val() == 0


def test_residue_examples():
    assert (F3.one() + t).residue() == 1
    assert t.residue() == 0
    x = F3.const(2) + t
    assert (x * x).residue() == 1
    with pytest.raises(DomainError):
        F3.uniformizer(-1).residue()


def test_precision_is_never_guessed():
    z = F3.zero(3)
    with pytest.raises(PrecisionError):
        z.val_at_least(5)
    assert z.val_at_least(2)
    assert not z.is_exact_zero()


def test_inverse_round_trip():
    x = F3.const(2) + t + t * t
    y = x.inverse(10)
    assert (x * y - 1).val_at_least(10)


def test_text_round_trip():
    x = FieldElem.make(k3, -2, [1, 0, 2], None)
    assert FieldElem.from_text(k3, x.to_text()) == x


@pytest.mark.parametrize("q", [2, 3, 4, 5, 9])
def test_finite_field_axioms(q):
    k = finite_field(q)
    assert len(list(k.units())) == q - 1
    for a in k.units():
        assert k.mul(a, k.inv(a)) == 1
    # the generator has order q - 1
    assert len({k.power(k.gen, e) for e in range(q - 1)}) == q - 1


def test_irreducible_quadratics():
    assert irreducible_quadratics(finite_field(2)) == [(1, 1)]
    assert len(irreducible_quadratics(finite_field(3))) == 3
    assert is_irreducible_quadratic(finite_field(3), 2, 0)
    with pytest.raises(DomainError, match="reducible"):
        QuadraticExtension(finite_field(3), 1, 0)


def test_quadratic_extension_root():
    E = QuadraticExtension(finite_field(3), 2, 0)
    X = E.X
    assert E.mul(X, X) == E.add(E.mul(E.embed(0), X), E.embed(2))
    assert len(list(E.units())) == 8


series = st.builds(lambda v, cs: FieldElem.make(k3, v, cs, None),
                   st.integers(-2, 2), st.lists(st.integers(0, 2), max_size=4))


@settings(max_examples=80, deadline=None)
@given(series, series, series)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == F3.zero()
