import random
from fractions import Fraction

from gammalab.localfield import FieldElem
from gammalab.orders import (
    LocalMatrix,
    MiddleElements,
    OrderSpec,
    SimpleElements,
    in_lattice,
    residue_blocks,
    volume_gl,
    volume_multiplicative,
)


def test_beta_stratum(S3):
    M = MiddleElements(S3, 2, S3.F.const(2), S3.F.const(0))
    one = LocalMatrix.identity(S3.k, 4)
    assert in_lattice(one, M.spec)
    assert in_lattice(M.beta, M.spec.power(-1))
    assert not in_lattice(M.beta, M.spec)
    assert (M.beta * M.beta_inverse).agrees_with(one)


def test_beta_normalizes_order(S3):
    M = MiddleElements(S3, 2, S3.F.const(2), S3.F.const(0))
    rng = random.Random(0)
    bounds = M.spec.bounds
    binv = M.beta_inverse
    for _ in range(100):
        x = LocalMatrix([[FieldElem.make(S3.k, bounds[i][j], [rng.randrange(3) for _ in range(2)], None)
                          for j in range(4)] for i in range(4)])
        assert in_lattice(M.beta * x * binv, M.spec)


def test_embed_OL(S3):
    F = S3.F
    M = MiddleElements(S3, 2, F.const(2), F.const(0))
    one = LocalMatrix.identity(S3.k, 4)
    assert M.embed_OL(F.const(2).inverse(), F.zero()).agrees_with(one)
    s = M.embed_OL(F.zero(), F.one())
    rhs = s.scale(M.d) + one.scale(M.c)
    assert (s * s).agrees_with(rhs)


def test_residue_blocks_of_sigma(S3):
    F = S3.F
    M = MiddleElements(S3, 2, F.const(1), F.const(1))
    blocks = residue_blocks(M.embed_OL(F.zero(), F.one()), M.spec)
    assert M.residue_in_kL(blocks) == M.E.X


def test_beta_u_power(S3):
    Se = SimpleElements(S3, 2, S3.F.const(2))
    assert Se.beta_power(2).det().valuation() == -2


def test_volumes(S3):
    assert volume_multiplicative(S3, 1) == S3.rational(Fraction(1, 2))
    # [GL2(O) : Iwahori U^1] = (q^2-1)(q^2-q)/q
    v = volume_gl(S3, OrderSpec.I_N(2), 1)
    assert v == S3.rational(Fraction(3, 8 * 6))
