from fractions import Fraction

import pytest

from gammalab.characters import FiniteMultChar, build_xi_middle, tame_family, trivial_character
from gammalab.orders import OrderSpec, volume_gl, volume_multiplicative
from gammalab.rankin import (
    GammaEngine,
    IntegrationConfig,
    ZeroDenominator,
    gamma_gl1,
    gamma_via_translates,
    jiang_target,
    verify_stabilized,
)
from gammalab.scalars import RationalFnX
from gammalab.types_supercuspidal import MiddleParams, RootParam, SimpleParams


def params(S, c, d, chi_e=1, zeta=(8, 3)):
    return MiddleParams(S.F.const(c), S.F.const(d), FiniteMultChar(S.q * S.q - 1, chi_e), RootParam(*zeta))


def test_tame_psi_and_gamma(S3):
    eng = GammaEngine(S3, 2)
    p = params(S3, 2, 0)
    k = S3.k
    for lam in tame_family(S3):
        r = eng.gl1(p, lam)
        assert r.psi == RationalFnX.constant(volume_multiplicative(S3, 1))
        x = S3.F.const(k.neg(k.inv(2))).shift(2)
        coeff = S3.scalar((-p.zeta.exponent(S3) + lam.exponent(x)) % S3.m) * S3.rational(3)
        assert r.gamma == RationalFnX.monomial(coeff, 2)
        assert (r.f_psi, r.f_abs) == (2, 6)
        # the dual sum carries lambda(c^-1 t^2) without the sign
        y = S3.F.const(k.inv(2)).shift(2)
        want = S3.scalar((-p.zeta.exponent(S3) + lam.exponent(y)) % S3.m) * S3.rational(3) * \
            volume_multiplicative(S3, 1)
        assert r.psi_tilde == RationalFnX.monomial(want, 2)


def test_trivial_twist_example(S3):
    r = gamma_gl1(S3, 2, params(S3, 2, 0, 1, (8, 1)), trivial_character(S3))
    assert r.monomial.coefficient == S3.K.root(8, -1) * S3.rational(3)
    assert r.monomial.degree == 2


def test_wild_psi_vanishes_without_translate(S2):
    chi = [c for c in build_xi_middle(S2) if c.conductor_level() == 2][0]
    with pytest.raises(ZeroDenominator):
        GammaEngine(S2, 2).gl1(params(S2, 1, 1), chi)


def test_stability_formula_q2(S2):
    p = params(S2, 1, 1)
    for chi in build_xi_middle(S2):
        if chi.c_def is None:
            continue
        r = gamma_via_translates(S2, 2, p, chi)
        assert r.notes["cross_checked"] and not r.notes.get("cross_check_failed")
        assert r.gamma == jiang_target(S2, 2, p, chi)


def test_simple_twist_psi_volume_and_degree(S3):
    eng = GammaEngine(S3, 2)
    p = params(S3, 2, 0)
    for u in (1, 2):
        sp = SimpleParams(S3.F.const(u), FiniteMultChar(2, 1), RootParam(8, 5))
        r = eng.glN(p, sp)
        assert r.psi == RationalFnX.constant(volume_gl(S3, OrderSpec.I_N(2), 1))
        assert (r.f_psi, r.f_abs) == (4, 12)


def test_haar_scale_cancels(S2):
    p = params(S2, 1, 1)
    sp = SimpleParams(S2.F.one(), FiniteMultChar(1, 0), RootParam(8, 1))
    a = GammaEngine(S2, 2).glN(p, sp)
    b = GammaEngine(S2, 2, IntegrationConfig(haar_scale=Fraction(5))).glN(p, sp)
    assert a.gamma == b.gamma and not a.psi == b.psi


def test_stabilization_and_negative_control(S3):
    p = params(S3, 2, 0)
    lam = tame_family(S3)[1]
    ok = verify_stabilized(lambda c: GammaEngine(S3, 2, c).gl1(p, lam), IntegrationConfig())
    assert ok["stable"]
    # a window that misses val(h) = -2 loses the support of the dual sum
    tiny = IntegrationConfig(valuation_window=(-1, 1))
    bad = verify_stabilized(lambda c: GammaEngine(S3, 2, c).gl1(p, lam).psi_tilde, tiny)
    assert not bad["stable"] and bad["first_divergent"] == "valuation_window"


def test_engine_reuses_term_lists(S3):
    eng = GammaEngine(S3, 2)
    lams = tame_family(S3)
    eng.gl1(params(S3, 2, 0), lams[0])
    cost = eng.cost
    for chi_e in range(8):
        for lam in lams:
            eng.gl1(params(S3, 2, 0, chi_e, (8, chi_e)), lam)
    assert eng.cost == cost
