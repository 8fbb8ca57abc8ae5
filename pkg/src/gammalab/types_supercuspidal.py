"""Parameters and characters of the extended maximal simple types.

Middle family (GL(2N)): J~ = beta_f^Z O_L^x U^1(A_2N) with
Lambda(beta_f^k a y) = zeta^k chi(res a) psi_beta(y).

Simple family (GL(N)): J~ = beta_u^Z O^x U^1(I_N) with
Lambda(beta_u^k x y) = zeta'^k phi(res x) psi_beta(y)^(+-1); the minus sign
gives the psi^-1 model used for the GL(N) twist.

All values are exponents modulo the session order m.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .characters import FiniteMultChar, Session, psi_exponent
from .localfield import DomainError, FieldElem, is_irreducible_quadratic
from .orders import (
    LocalMatrix,
    MiddleElements,
    OrderSpec,
    SimpleElements,
    in_lattice,
    in_unit_group,
    residue_blocks,
)


class NotInGroup(Exception):
    """The element does not lie in the group J~."""


@dataclass(frozen=True)
class RootParam:
    """zeta_order^e."""

    order: int
    e: int

    def exponent(self, S: Session) -> int:
        return S.root_exp(self.order, self.e)

    def to_text(self) -> str:
        return f"{self.order}:{self.e}"

    @classmethod
    def parse(cls, text: str) -> "RootParam":
        o, e = text.split(":")
        return cls(int(o), int(e) % int(o))


@dataclass(frozen=True)
class MiddleParams:
    c: FieldElem
    d: FieldElem
    chi: FiniteMultChar
    zeta: RootParam

    def check(self, S: Session) -> None:
        if not is_irreducible_quadratic(S.k, self.c.residue(), self.d.residue()):
            raise DomainError("f̄ reducible over F_q")

    @property
    def fbar(self) -> tuple[int, int]:
        return self.c.residue(), self.d.residue()

    def key(self) -> tuple:
        return (self.fbar, self.chi.e, self.zeta.to_text())

    def to_json(self) -> dict:
        return {"c": self.c.to_text(), "d": self.d.to_text(), "chi": self.chi.to_json(), "zeta": self.zeta.to_text()}

    @classmethod
    def from_json(cls, S: Session, data: dict) -> "MiddleParams":
        return cls(FieldElem.from_text(S.k, data["c"]), FieldElem.from_text(S.k, data["d"]),
                   FiniteMultChar(**data["chi"]), RootParam.parse(data["zeta"]))


@dataclass(frozen=True)
class SimpleParams:
    u: FieldElem
    phi: FiniteMultChar
    zeta_prime: RootParam

    def key(self) -> tuple:
        return (self.u.residue(), self.phi.e, self.zeta_prime.to_text())

    def to_json(self) -> dict:
        return {"u": self.u.to_text(), "phi": self.phi.to_json(), "zeta_prime": self.zeta_prime.to_text()}

    @classmethod
    def from_json(cls, S: Session, data: dict) -> "SimpleParams":
        return cls(FieldElem.from_text(S.k, data["u"]), FiniteMultChar(**data["phi"]), RootParam.parse(data["zeta_prime"]))


@dataclass(frozen=True)
class CentralCharacter:
    """omega(t^v u) = unif^v * units(res u), as exponents mod m."""

    units: FiniteMultChar
    unif_exp: int

    def exponent(self, S: Session, x: FieldElem) -> int:
        v = x.valuation()
        return (v * self.unif_exp + self.units.on_fq(S, x.coeffs[0])) % S.m

    def trivial_on_one_plus_P(self) -> bool:
        return True


# ---------------------------------------------------------------------------


def psi_beta_exponent(S: Session, x: LocalMatrix, beta: LocalMatrix) -> int:
    """psi_F(tr(beta (x - 1)))."""
    n = x.n
    acc = None
    for i in range(n):
        for j in range(n):
            b = beta.rows[i][j]
            if b.coeffs:
                y = x.rows[j][i] - 1 if i == j else x.rows[j][i]
                t = b * y
                acc = t if acc is None else acc + t
    if acc is None:
        return 0
    return psi_exponent(S, acc)


def psi_beta(S: Session, x: LocalMatrix, beta: LocalMatrix, spec: OrderSpec):
    if not in_unit_group(x, spec, 1):
        raise DomainError("psi_beta is defined on U^1")
    return S.scalar(psi_beta_exponent(S, x, beta))


@dataclass
class Factorization:
    """h = beta^k * unit * u1 with unit an embedded residue lift and u1 in U^1."""

    k: int
    residue: int
    unit: LocalMatrix
    u1: LocalMatrix


def factorize_middle(M: MiddleElements, h: LocalMatrix) -> Factorization:
    dv = h.det().valuation()
    if dv % M.det_val_beta:
        raise NotInGroup(f"det valuation {dv} is not a multiple of {M.det_val_beta}")
    k = dv // M.det_val_beta
    y = M.beta_power(-k) * h
    if not in_lattice(y, M.spec):
        raise NotInGroup("beta^-k h not in the order")
    a = M.residue_in_kL(residue_blocks(y, M.spec))
    if a is None:
        raise NotInGroup("residue not in k_L^x")
    unit = M.embed_residue(a)
    u1 = M.embed_residue(M.E.inv(a)) * y
    if not in_unit_group(u1, M.spec, 1):
        raise NotInGroup("remainder not in U^1")
    return Factorization(k, a, unit, u1)


def factorize_simple(Se: SimpleElements, h: LocalMatrix) -> Factorization:
    S = Se.S
    dv = h.det().valuation()
    k = -dv
    y = Se.beta_power(-k) * h
    if not in_lattice(y, Se.spec):
        raise NotInGroup("beta^-k h not in the order")
    blocks = residue_blocks(y, Se.spec)
    x = blocks[0][0][0]
    if x == 0 or any(b[0][0] != x for b in blocks):
        raise NotInGroup("residue not scalar")
    unit = LocalMatrix.identity(S.k, Se.n).scale(S.F.const(x))
    u1 = y.scale(S.F.const(S.k.inv(x)))
    if not in_unit_group(u1, Se.spec, 1):
        raise NotInGroup("remainder not in U^1")
    return Factorization(k, x, unit, u1)


def factorize_Jtilde(elements, h: LocalMatrix) -> Factorization:
    if isinstance(elements, MiddleElements):
        return factorize_middle(elements, h)
    return factorize_simple(elements, h)


def lambda_middle_exponent(S: Session, M: MiddleElements, p: MiddleParams, h: LocalMatrix) -> int:
    f = factorize_middle(M, h)
    return (f.k * p.zeta.exponent(S) + p.chi.on_fq2(S, M.E, f.residue)
            + psi_beta_exponent(S, f.u1, M.beta)) % S.m


def lambda_middle(S, M, p, h):
    return S.scalar(lambda_middle_exponent(S, M, p, h))


def lambda_simple_exponent(S: Session, Se: SimpleElements, p: SimpleParams, h: LocalMatrix, conj: bool = False) -> int:
    f = factorize_simple(Se, h)
    sign = -1 if conj else 1
    return (f.k * p.zeta_prime.exponent(S) + p.phi.on_fq(S, f.residue)
            + sign * psi_beta_exponent(S, f.u1, Se.beta)) % S.m


def lambda_simple(S, Se, p, h, conj=False):
    return S.scalar(lambda_simple_exponent(S, Se, p, h, conj))


def central_character_middle(S: Session, M: MiddleElements, p: MiddleParams) -> CentralCharacter:
    """omega(t) = zeta^-N chi(sigma_f); omega(z) = chi(z) for z in k^x inside k_L^x."""
    N = M.N
    sigma_res = M.E.X
    unif = (-N * p.zeta.exponent(S) + p.chi.on_fq2(S, M.E, sigma_res)) % S.m
    # chi restricted to k^x: k^x = <g^(q+1)> inside k_L^x
    q = S.q
    gk = S.k.gen
    log_in_E = M.E.log(M.E.embed(gk))
    # exponent of the induced character of k^x relative to the generator of k^x
    e = (p.chi.e * log_in_E) % p.chi.order
    units = _restrict_char(S, p.chi.order, e, q - 1)
    return CentralCharacter(units, unif)


def _restrict_char(S: Session, order: int, value_exp_at_gen: int, new_order: int) -> FiniteMultChar:
    # character of cyclic group of order new_order whose value at its generator is zeta_order^value_exp_at_gen
    num = value_exp_at_gen * new_order
    if num % order:
        raise DomainError("restriction does not have the expected order")
    return FiniteMultChar(new_order, (num // order) % new_order)


def central_character_simple(S: Session, Se: SimpleElements, p: SimpleParams) -> CentralCharacter:
    """omega(t) = (zeta'^N phi(u))^-1; omega = phi on O^x."""
    N = Se.N
    unif = (-(N * p.zeta_prime.exponent(S) + p.phi.on_fq(S, Se.u.residue()))) % S.m
    return CentralCharacter(p.phi, unif)


def stratum_min_poly(S: Session, elements) -> tuple[tuple[int, ...], int]:
    """(minimal polynomial over k, multiplicity) of the reduced characteristic polynomial of Y = beta^N t.

    Coefficients are listed from the constant term up; the polynomial is
    monic.  The characteristic polynomial of Y mod P is the product of the
    characteristic polynomials of its residue blocks.
    """
    k = S.k
    N = elements.N
    Y = elements.beta_power(N).scale(S.F.uniformizer(1))
    blocks = residue_blocks(Y, elements.spec)
    polys = []
    for b in blocks:
        if len(b) == 1:
            polys.append((k.neg(b[0][0]), 1))
        else:
            tr = k.add(b[0][0], b[1][1])
            det = k.sub(k.mul(b[0][0], b[1][1]), k.mul(b[0][1], b[1][0]))
            polys.append((det, k.neg(tr), 1))
    first = polys[0]
    if any(p != first for p in polys):
        raise DomainError("reduced characteristic polynomial is not a power of one factor")
    return first, len(polys)


def depth(family: str, N: int) -> Fraction:
    return Fraction(1, N)


# ---------------------------------------------------------------------------
# enumeration of filtration quotients


def filtration_reps(S: Session, spec: OrderSpec, lo: int, hi: int):
    """Yield 1 + x for x running over lifts of P^lo / P^hi (lo >= 1)."""
    n = spec.n
    b_lo = spec.power(lo).bounds
    b_hi = spec.power(hi).bounds
    slots = [(a, b, l) for a in range(n) for b in range(n) for l in range(b_lo[a][b], b_hi[a][b])]
    q = S.q
    k = S.k
    for code in itertools.product(range(q), repeat=len(slots)):
        ent: dict = {}
        for (a, b, l), c in zip(slots, code):
            if c:
                ent.setdefault((a, b), {})[l] = c
        rows = LocalMatrix.identity(k, n).rows
        for (a, b), terms in ent.items():
            lo_e = min(terms)
            coeffs = [terms.get(lo_e + i, 0) for i in range(max(terms) - lo_e + 1)]
            x = FieldElem.make(k, lo_e, coeffs, None)
            rows[a][b] = rows[a][b] + x
        yield LocalMatrix(rows)


def bessel_average_middle(S: Session, M: MiddleElements, p: MiddleParams, g: LocalMatrix) -> int | None:
    """[U^1:U^2]^-1 sum over U^1/U^2 of psi_beta(h)^-1 Lambda(g h), as a Scalar.

    Here the type is a character, so its trace character is Lambda itself.
    Returns the average as a Scalar.
    """
    from .scalars import RootSum

    acc = RootSum(S.K)
    count = 0
    for h in filtration_reps(S, M.spec, 1, 2):
        e = -psi_beta_exponent(S, h, M.beta) + lambda_middle_exponent(S, M, p, g * h)
        acc.add(e, 1)
        count += 1
    return acc.to_scalar() * S.rational(Fraction(1, count))
