from fractions import Fraction

from gammalab.characters import (
    build_xi_d,
    build_xi_middle,
    psi_F,
    tame_character,
    tate_gamma,
    trivial_character,
)
from gammalab.scalars import as_monomial


def test_psi_examples(S3):
    F = S3.F
    zeta3 = S3.K.root(3, 1)
    assert psi_F(S3, F.uniformizer(1)) == S3.K.one
    assert psi_F(S3, F.one()) == zeta3
    assert psi_F(S3, F.uniformizer(-1) + F.one()) == zeta3


def test_xi_middle_shape(S2, S3):
    for S in (S2, S3):
        xi = build_xi_middle(S)
        assert len(xi) == S.q + 1
        assert sorted(c.conductor_level() for c in xi) == [0] + [2] * (S.q - 1) + [3]
    assert [c.conductor_level() for c in build_xi_d(S3, Fraction(1, 3))] == \
        [c.conductor_level() for c in build_xi_middle(S3)]


def test_xi_values(S3):
    F = S3.F
    one = trivial_character(S3)
    assert one.exponent(F.const(2) + F.uniformizer(1)) == 0
    lvl2 = [c for c in build_xi_middle(S3) if c.conductor_level() == 2 and c.c_def == F.uniformizer(-2)]
    assert lvl2
    x = F.one() + F.uniformizer(2)
    assert lvl2[0](x) == S3.K.root(3, 1)


def test_tame_character_values(S3):
    F = S3.F
    lam = tame_character(S3, 1, S3.root_exp(4, 1))
    assert lam(F.uniformizer(1)) == S3.K.root(4, 1)
    assert lam(F.const(2)) == -S3.K.one
    assert lam(F.one() + F.uniformizer(1)) == S3.K.one


def test_tate_gamma_of_wild_character_is_monomial(S3):
    for chi in build_xi_middle(S3):
        if chi.c_def is None:
            continue
        m = as_monomial(tate_gamma(S3, chi))
        assert m.degree == chi.conductor_level()


def test_tate_gamma_of_trivial_character_is_not_monomial(S3):
    assert not as_monomial(tate_gamma(S3, trivial_character(S3)))
