from fractions import Fraction

import pytest

from gammalab.characters import FiniteMultChar
from gammalab.localfield import FieldElem
from gammalab.orders import LocalMatrix, MiddleElements, SimpleElements, g_u_matrix
from gammalab.types_supercuspidal import (
    MiddleParams,
    NotInGroup,
    RootParam,
    SimpleParams,
    central_character_middle,
    depth,
    factorize_middle,
    lambda_middle,
    lambda_simple,
    psi_beta,
    stratum_min_poly,
)


@pytest.fixture
def mid(S3):
    F = S3.F
    p = MiddleParams(F.const(2), F.const(0), FiniteMultChar(8, 3), RootParam(8, 1))
    return p, MiddleElements(S3, 2, p.c, p.d)


def test_lambda_middle_examples(S3, mid):
    p, M = mid
    F = S3.F
    assert lambda_middle(S3, M, p, M.beta) == S3.K.root(8, 1)
    unif = LocalMatrix.identity(S3.k, 4).scale(F.uniformizer(1))
    want = S3.scalar((-2 * p.zeta.exponent(S3) + p.chi.on_fq2(S3, M.E, M.E.X)) % S3.m)
    assert lambda_middle(S3, M, p, unif) == want
    a = M.embed_OL(F.const(1), F.const(1))
    assert lambda_middle(S3, M, p, a) == S3.scalar(p.chi.on_fq2(S3, M.E, M.E.make(2, 1)))


def test_psi_beta_identity(S3, mid):
    _, M = mid
    assert psi_beta(S3, LocalMatrix.identity(S3.k, 4), M.beta, M.spec) == S3.K.one


def test_factorize_middle(S3, mid):
    p, M = mid
    F = S3.F
    h0 = LocalMatrix.identity(S3.k, 4)
    f = factorize_middle(M, h0)
    assert (f.k, f.residue) == (0, 1)
    y = h0.with_entry(1, 0, F.uniformizer(1))
    h = M.beta_power(2) * M.embed_OL(F.zero(), F.one()) * y
    f = factorize_middle(M, h)
    assert f.k == 2 and f.residue == M.E.X
    assert (M.beta_power(2) * f.unit * f.u1).agrees_with(h)
    with pytest.raises(NotInGroup):
        factorize_middle(M, g_u_matrix(S3, 2, F.one()))


def test_lambda_simple_examples(S3):
    F = S3.F
    sp = SimpleParams(F.const(2), FiniteMultChar(2, 1), RootParam(8, 3))
    Se = SimpleElements(S3, 2, sp.u)
    assert lambda_simple(S3, Se, sp, Se.beta) == S3.K.root(8, 3)
    unif = LocalMatrix.identity(S3.k, 2).scale(F.uniformizer(1))
    want = (S3.K.root(8, 3) ** 2 * S3.scalar(sp.phi.on_fq(S3, 2))).inverse()
    assert lambda_simple(S3, Se, sp, unif) == want
    # psi^-1 model on U^1
    h = LocalMatrix([[F.one(), F.const(1)], [F.uniformizer(1), F.one()]])
    x = F.const(1) + F.uniformizer(1) * F.uniformizer(-1) * sp.u.inverse()
    want = S3.K.root(3, 1) ** -x.residue()
    assert lambda_simple(S3, Se, sp, h, conj=True) == want


def test_central_character_trivial_params(S3):
    F = S3.F
    p = MiddleParams(F.const(2), F.const(0), FiniteMultChar(8, 0), RootParam(1, 0))
    om = central_character_middle(S3, MiddleElements(S3, 2, p.c, p.d), p)
    assert om.exponent(S3, F.const(2)) == 0
    assert om.exponent(S3, F.uniformizer(1)) == 0


def test_min_polys_and_depth(S3):
    F = S3.F
    poly, mult = stratum_min_poly(S3, MiddleElements(S3, 2, F.const(2), F.const(0)))
    assert poly == (1, 0, 1)  # X^2 + 1 over F_3
    poly, _ = stratum_min_poly(S3, SimpleElements(S3, 2, F.const(1)))
    assert poly == (2, 1)  # X - 1
    assert depth("middle", 2) == Fraction(1, 2)


def test_reducible_fbar_rejected(S3):
    from gammalab.localfield import DomainError
    p = MiddleParams(S3.F.const(1), S3.F.const(0), FiniteMultChar(8, 0), RootParam(8, 0))
    with pytest.raises(DomainError, match="reducible"):
        p.check(S3)
    assert FieldElem.make(S3.k, 0, [1], None) == S3.F.one()
