"""Additive and multiplicative characters, the sets Xi, and Tate's gamma factor.

All character values are m-th roots of unity for the session order m, so
characters return integer exponents modulo m; ``Session.scalar`` turns an
exponent into a Scalar.  Keeping exponents makes large character sums cheap
(see RootSum).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import ceil

from .localfield import FieldElem, FiniteField, LocalField, PrecisionError, QuadraticExtension, DomainError
from .scalars import (
    ConfigurationError,
    LaurentPoly,
    RationalFnX,
    RootSum,
    Scalar,
    cyclotomic_field,
    session_order,
)


class Session:
    """Read-only context: the local field, residue field, and Q(zeta_m)."""

    def __init__(self, q: int, precision: int = 8, m_zeta: int = 8, max_wild_level: int = 4):
        self.q = q
        self.F = LocalField(q, precision)
        self.k: FiniteField = self.F.k
        self.p = self.k.p
        self.precision = precision
        self.m_zeta = m_zeta
        self.max_wild_level = max_wild_level
        self.m = session_order(q, m_zeta, max_wild_level)
        self.K = cyclotomic_field(self.m)
        self.sqrt_q = self.K.sqrt_q(q)
        self._quad: dict = {}

    def scalar(self, exponent: int) -> Scalar:
        return self.K.zeta_power(exponent)

    def rational(self, r) -> Scalar:
        return self.K.rational(r)

    def q_power(self, half_exponent: int) -> Scalar:
        """q^(half_exponent/2)."""
        out = self.K.rational(Fraction(self.q) ** (half_exponent // 2))
        return out * self.sqrt_q if half_exponent % 2 else out

    def root_exp(self, order: int, e: int) -> int:
        """Exponent mod m of zeta_order^e."""
        if self.m % order:
            raise ConfigurationError(f"root of unity of order {order} needs m divisible by {order}; session m={self.m}")
        return (self.m // order) * e % self.m

    def quadratic(self, c: int, d: int) -> QuadraticExtension:
        key = (c, d)
        if key not in self._quad:
            self._quad[key] = QuadraticExtension(self.k, c, d)
        return self._quad[key]

    def with_precision(self, precision: int) -> "Session":
        return Session(self.q, precision, self.m_zeta, self.max_wild_level)

    def __repr__(self):
        return f"Session(q={self.q}, P={self.precision}, m={self.m})"


# ---------------------------------------------------------------------------
# additive character


def psi_exponent(S: Session, x: FieldElem) -> int:
    """psi_F(x) as an exponent mod m: zeta_p^Tr(coefficient of t^0)."""
    try:
        c0 = x.coefficient(0)
    except PrecisionError:
        raise PrecisionError("psi_F needs the coefficient of t^0") from None
    return (S.m // S.p) * S.k.trace_to_prime(c0) % S.m


def psi_F(S: Session, x: FieldElem) -> Scalar:
    return S.scalar(psi_exponent(S, x))


# ---------------------------------------------------------------------------
# finite-field characters


@dataclass(frozen=True)
class FiniteMultChar:
    """Character of a cyclic group of the given order: g0^j -> zeta_order^(e j)."""

    order: int
    e: int

    def exponent(self, S: Session, log: int) -> int:
        return S.root_exp(self.order, self.e * log)

    def on_fq(self, S: Session, a: int) -> int:
        return self.exponent(S, S.k.log(a))

    def on_fq2(self, S: Session, E: QuadraticExtension, a: int) -> int:
        return self.exponent(S, E.log(a))

    def inverse(self) -> "FiniteMultChar":
        return FiniteMultChar(self.order, (-self.e) % self.order)

    def is_trivial(self) -> bool:
        return self.e % self.order == 0

    def to_json(self) -> dict:
        return {"order": self.order, "e": self.e}


def fq_characters(S: Session) -> list[FiniteMultChar]:
    return [FiniteMultChar(S.q - 1, e) for e in range(S.q - 1)]


def fq2_characters(S: Session) -> list[FiniteMultChar]:
    return [FiniteMultChar(S.q * S.q - 1, e) for e in range(S.q * S.q - 1)]


# ---------------------------------------------------------------------------
# quasi-characters of F^x


def _unit_key(S: Session, x: FieldElem, level: int) -> tuple[int, int, tuple]:
    """Split x = t^v * u0 * (1 + w) and return (v, u0, (w_1..w_level))."""
    k = S.k
    v = x.valuation()
    if x.prec is not None and x.prec < v + level + 1:
        raise PrecisionError(f"character of level {level} needs precision {v + level + 1}, have {x.prec}")
    u0 = x.coeffs[0]
    inv = k.inv_t[u0]
    mul = k.mul_t[inv]
    w = tuple(mul[x.coeffs[i]] if i < len(x.coeffs) else 0 for i in range(1, level + 1))
    return v, u0, w


def _one_plus_mul(k: FiniteField, a: tuple, b: tuple) -> tuple:
    """(1+a)(1+b) truncated, a, b given by coefficients of t^1..t^L."""
    L = len(a)
    out = [k.add(x, y) for x, y in zip(a, b)]
    for i in range(L):
        if a[i]:
            for j in range(L - i - 1):
                if b[j]:
                    # t^(i+1) * t^(j+1) lands at index i+j+1
                    out[i + j + 1] = k.add(out[i + j + 1], k.mul(a[i], b[j]))
    return tuple(out)


def wild_character_table(S: Session, c_def: FieldElem, level: int) -> dict[tuple, int]:
    """Exponents of a character of (1+P)/(1+P^(level+1)) extending x -> psi(c_def x).

    The defining identity holds on 1+P^(floor(level/2)+1), where it is a
    homomorphism.  The extension to the rest of the group is canonical:
    elements are scanned in a fixed order and each new generator g, whose
    smallest power g^r lands in the part already defined, receives the
    least exponent e' with r e' equal to the known value.
    """
    k, m = S.k, S.m
    L = level
    h = L // 2 + 1
    q = k.q
    elements = []
    for code in range(q**L):
        elements.append(tuple((code // q**i) % q for i in range(L)))
    values: dict[tuple, int] = {}
    for w in elements:
        if all(c == 0 for c in w[: h - 1]):
            # x = sum w_i t^i with i >= h
            x = FieldElem.make(k, 1, list(w), L + 1)
            values[w] = psi_exponent(S, c_def * x)
    for g in elements:
        if g in values:
            continue
        power, r = g, 1
        powers = [tuple([0] * L), g]
        while power not in values:
            power = _one_plus_mul(k, power, g)
            r += 1
            powers.append(power)
        target = values[power]
        ext = next(e for e in range(m) if (r * e - target) % m == 0)
        old = list(values.items())
        for i in range(1, r):
            gi = powers[i]
            for s, val in old:
                values[_one_plus_mul(k, s, gi)] = (val + i * ext) % m
    return values


class QuasiCharacter:
    """Quasi-character of F^x = t^Z x k^x x (1+P).

    ``tame`` is a character of k^x (through the residue of the unit part),
    ``unif_exp`` the exponent of chi(t), and the wild part a table on
    (1+P)/(1+P^(level+1)) (absent when level is 0).
    """

    def __init__(self, S: Session, tame: FiniteMultChar, unif_exp: int = 0,
                 level: int = 0, c_def: FieldElem | None = None, label: str = ""):
        if level > S.max_wild_level:
            raise ConfigurationError(f"wild level {level} exceeds supported level {S.max_wild_level}")
        self.S = S
        self.tame = tame
        self.unif_exp = unif_exp % S.m
        self.level = level
        self.c_def = c_def
        self.label = label
        self.table = wild_character_table(S, c_def, level) if level else None

    def exponent(self, x: FieldElem) -> int:
        v, u0, w = _unit_key(self.S, x, self.level)
        e = v * self.unif_exp + self.tame.on_fq(self.S, u0)
        if self.table is not None:
            e += self.table[w]
        return e % self.S.m

    def __call__(self, x: FieldElem) -> Scalar:
        return self.S.scalar(self.exponent(x))

    def unit_exponent(self, u0: int, w: tuple = ()) -> int:
        e = self.tame.on_fq(self.S, u0)
        if self.table is not None:
            w = tuple(w) + (0,) * (self.level - len(w))
            e += self.table[w[: self.level]]
        return e % self.S.m

    def inverse(self) -> "QuasiCharacter":
        out = object.__new__(QuasiCharacter)
        out.S, out.tame, out.level, out.label = self.S, self.tame.inverse(), self.level, self.label + "^-1"
        out.unif_exp = (-self.unif_exp) % self.S.m
        out.c_def = None if self.c_def is None else -self.c_def
        out.table = None if self.table is None else {w: (-e) % self.S.m for w, e in self.table.items()}
        return out

    def conductor_level(self) -> int:
        """Least L with the character trivial on 1+P^(L+1)."""
        if self.table is None:
            return 0
        for L in range(self.level + 1):
            if all(e == 0 for w, e in self.table.items() if all(c == 0 for c in w[:L])):
                return L
        return self.level

    def is_tame(self) -> bool:
        return self.table is None

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "level": self.level,
            "c_def": None if self.c_def is None else self.c_def.to_text(),
            "tame": self.tame.to_json(),
            "unif_exp": self.unif_exp,
            "m": self.S.m,
        }

    def __repr__(self):
        return f"QuasiCharacter({json.dumps(self.to_json())})"


def trivial_character(S: Session) -> QuasiCharacter:
    return QuasiCharacter(S, FiniteMultChar(S.q - 1, 0), 0, label="1")


def tame_character(S: Session, e: int, unif_exp: int) -> QuasiCharacter:
    return QuasiCharacter(S, FiniteMultChar(S.q - 1, e), unif_exp, label=f"tame({e},{unif_exp})")


def tame_family(S: Session, m_lambda: int = 4) -> list[QuasiCharacter]:
    """All tame characters with lambda(t) in mu_{m_lambda}."""
    return [tame_character(S, e, S.root_exp(m_lambda, j)) for e in range(S.q - 1) for j in range(m_lambda)]


def wild_character(S: Session, c_def: FieldElem, level: int, label: str = "") -> QuasiCharacter:
    return QuasiCharacter(S, FiniteMultChar(S.q - 1, 0), 0, level, c_def, label or f"wild({c_def.to_text()})")


def build_xi_d(S: Session, d: Fraction) -> list[QuasiCharacter]:
    """Characters chi_{r_i t^-a}, chi_{t^-(a+1)} and the trivial one, a = ceil(2d+1).

    The r_i run over the constant units, which represent O^x/(1+P) for
    d <= 1.
    """
    d = Fraction(d)
    if d <= 0:
        raise DomainError("depth must be positive")
    a = ceil(2 * d + 1)
    b = ceil(2 * d + 2)
    if b > S.max_wild_level or ceil(d) > 1:
        raise ConfigurationError(f"unsupported wild level {b} (depth {d})")
    out = []
    for mu in S.k.units():
        out.append(wild_character(S, S.F.elem([mu], -a), a, label=f"chi[{mu}*t^-{a}]"))
    out.append(wild_character(S, S.F.uniformizer(-b), b, label=f"chi[t^-{b}]"))
    out.append(trivial_character(S))
    return out


def build_xi_middle(S: Session) -> list[QuasiCharacter]:
    return build_xi_d(S, Fraction(1, 2))


# ---------------------------------------------------------------------------
# GL(1) gamma factor


def tate_gamma(S: Session, chi: QuasiCharacter) -> RationalFnX:
    """gamma(s, chi, psi_F) = Z(1-s, chi^-1, f^) / Z(s, chi, f) as a function of X.

    Unramified chi uses f = 1_O, whose transform is q^(1/2) 1_P, and both
    integrals are geometric series.  Ramified chi with a = level + 1 uses
    f = 1_{1+P^a}; then Z(s) = vol(1+P^a) and f^(y) = psi(y) q^(1/2-a) on
    P^(1-a), so Z(1-s) is a finite sum of shells computed by brute force.
    """
    K = S.K
    q = S.q
    one = K.one
    if chi.is_tame() and chi.tame.is_trivial():
        cw = S.scalar(chi.unif_exp)
        z_s = RationalFnX(LaurentPoly(K, {0: one}), LaurentPoly(K, {0: one, 1: -cw}))
        r = cw.inverse() * K.rational(Fraction(1, q))
        z_dual = RationalFnX(LaurentPoly(K, {-1: S.sqrt_q * r}), LaurentPoly(K, {0: one, -1: -r}))
        return z_dual / z_s
    if chi.is_tame():
        a = 1
    else:
        a = chi.conductor_level() + 1
    k = S.k
    coset_vol = Fraction(1, (q - 1) * q ** (a - 1))
    inv = chi.inverse()
    total = LaurentPoly(K)
    # shells n >= 1 - a; beyond n = 0 the integrand is psi-trivial and chi^-1 sums to 0
    for n in range(1 - a, a + 2):
        acc = RootSum(K)
        for u0 in k.units():
            for code in range(q ** (a - 1)):
                w = tuple((code // q**i) % q for i in range(a - 1))
                # y = t^n * u0 * (1 + w)
                coeffs = [u0] + [k.mul(u0, c) for c in w]
                y = FieldElem.make(k, n, coeffs, n + a)
                e = psi_exponent(S, y) if n <= 0 else 0
                acc.add(e + n * inv.unif_exp + inv.unit_exponent(u0, w), coset_vol)
        shell = acc.to_scalar()
        if not shell.is_zero():
            total = total + LaurentPoly(K, {-n: shell * K.rational(Fraction(q) ** (-n))})
    z_dual = RationalFnX(total) * (S.q_power(1 - 2 * a))
    z_s = K.rational(Fraction(q) ** (1 - a) / (q - 1))
    return z_dual / z_s
