import random

import pytest

from gammalab.characters import FiniteMultChar
from gammalab.localfield import FieldElem
from gammalab.orders import LocalMatrix, MiddleElements, diag
from gammalab.types_supercuspidal import MiddleParams, RootParam, lambda_middle_exponent
from gammalab.whittaker import (
    CostGuardExceeded,
    NotInSupport,
    WhittakerFn,
    alpha_gl1,
    alpha_glN,
    decompose,
    membership_oracle,
    psi_n_exponent,
    reduce_to_lattice,
    support_alpha_gl1,
    support_alpha_glN,
)


@pytest.fixture(scope="module")
def W3():
    from gammalab.characters import Session
    S = Session(3)
    F = S.F
    p = MiddleParams(F.const(2), F.const(0), FiniteMultChar(8, 3), RootParam(8, 1))
    return S, p, WhittakerFn.middle(S, 2, p)


def test_value_at_identity_and_beta(W3):
    S, p, W = W3
    M = W.elements
    one = LocalMatrix.identity(S.k, 4)
    assert W.exponent(one) == 0
    u = one.with_entry(0, 1, S.F.one())
    assert psi_n_exponent(S, u) == S.root_exp(3, 1)
    assert W.exponent(u * M.beta) == (S.root_exp(3, 1) + p.zeta.exponent(S)) % S.m


def test_diagonal_support(W3):
    S, _, W = W3
    F = S.F
    assert W.exponent(diag(S, [F.one() + F.uniformizer(1), F.one(), F.one(), F.one()])) == 0
    assert W.exponent(diag(S, [F.const(2), F.one(), F.one(), F.one()])) is None


def test_transformation_law(W3):
    S, p, W = W3
    M = W.elements
    rng = random.Random(4)
    one = LocalMatrix.identity(S.k, 4)
    for _ in range(10):
        u = one
        for i in range(4):
            for j in range(i + 1, 4):
                u = u.with_entry(i, j, FieldElem.make(S.k, rng.randint(-2, 1), [rng.randrange(3)], None))
        g = M.beta_power(rng.randint(-2, 2)) * M.embed_residue(rng.randrange(1, 9))
        e = W.exponent(g)
        assert e == lambda_middle_exponent(S, M, p, g)
        assert W.exponent(u * g) == (e + psi_n_exponent(S, u)) % S.m


def test_tilde_is_an_involution(W3):
    S, _, W = W3
    M = W.elements
    one = LocalMatrix.identity(S.k, 4)
    Wtt = W.tilde().tilde()
    for g in (M.beta, one.with_entry(0, 3, S.F.uniformizer(-1)) * M.beta_power(-1)):
        assert Wtt.exponent(g) == W.exponent(g)


def test_support_alpha_gl1_examples(W3):
    S, p, W = W3
    F = S.F
    M = W.elements
    h = M.c * F.uniformizer(-2)
    zero = [F.zero(), F.zero()]
    f = support_alpha_gl1(S, M, h, zero)
    a = alpha_gl1(S, 2, h, zero)
    assert (f.u * M.beta_power(-1) * f.z).agrees_with(a)
    assert W.exponent(a) == (-p.zeta.exponent(S) + psi_n_exponent(S, f.u)) % S.m
    with pytest.raises(NotInSupport):
        support_alpha_gl1(S, M, F.one(), zero)
    # h^-1 = c^-1 t^2 (1 + t) with x_1 in P^-1
    hinv = M.c.inverse(12) * F.uniformizer(2) * (F.one() + F.uniformizer(1))
    support_alpha_gl1(S, M, hinv.inverse(12), [F.uniformizer(-1), F.zero()])


def test_support_alpha_glN_shifted_coset(W3):
    S, _, W = W3
    F, k = S.F, S.k
    M = W.elements
    for u in (1, 2):
        c = M.cbar
        a = k.mul(u, k.inv(k.sub(k.mul(c, u * u % 3), 1)))
        h = diag(S, [F.const(k.mul(a, u)).shift(2)] * 2)
        support_alpha_glN(S, M, h, [[F.zero()], [F.const(u).shift(1)]], F.const(u))
        # the untranslated x = 0 point is not in the support
        with pytest.raises(NotInSupport):
            support_alpha_glN(S, M, h, [[F.zero()], [F.zero()]], F.const(u))
        wrong = diag(S, [F.const(k.neg(k.mul(a, u))).shift(2)] * 2)
        with pytest.raises(NotInSupport):
            support_alpha_glN(S, M, wrong, [[F.zero()], [F.const(u).shift(1)]], F.const(u))


def test_membership_oracle(S2):
    F = S2.F
    M = MiddleElements(S2, 2, F.one(), F.one())
    one = LocalMatrix.identity(S2.k, 4)
    assert {k for k, _ in membership_oracle(M, one, depth=1)} == {0}
    h = M.c * F.uniformizer(-2)
    a = alpha_gl1(S2, 2, h, [F.uniformizer(-1), F.zero()])
    assert {k for k, _ in membership_oracle(M, a, depth=2)} == {-1}
    assert decompose(M, a).k == -1
    with pytest.raises(CostGuardExceeded):
        membership_oracle(M, a, depth=3, max_cost=10)


def test_reduce_to_lattice_shift_identity(S2):
    # regression: rows already carrying the identity must not be shifted twice
    F = S2.F
    M = MiddleElements(S2, 2, F.one(), F.one())
    g = alpha_gl1(S2, 2, F.uniformizer(-2), [FieldElem.make(S2.k, -1, [1, 0, 1], None), F.zero()])
    y = g * M.beta_power(1)
    assert reduce_to_lattice(y, M.spec.power(1), shift_identity=True) is not None


def test_alpha_glN_shape(S3):
    F = S3.F
    h = diag(S3, [F.one(), F.one()])
    g = alpha_glN(S3, 2, h, [[F.zero()], [F.zero()]], F.one())
    assert g.det().valuation() == 0
