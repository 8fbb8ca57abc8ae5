"""Exact scalars for character values, volumes and gamma factors.

Every complex number that shows up in the computations is an element of a
cyclotomic field Q(zeta_m).  Elements are stored in the power basis
1, zeta, ..., zeta^(phi(m)-1) as an integer numerator vector over a common
positive denominator, so equality is structural after normalisation.

The square root of q lives inside Q(zeta_m) as soon as 4p divides m (a
quadratic Gauss sum for odd p, zeta_8 + zeta_8^-1 for p = 2), which the
session order always guarantees.  Half-integral powers of q are therefore
ordinary field elements.

Rational functions in X = q^(-s) are pairs of Laurent polynomials with
scalar coefficients, kept in lowest terms with denominator normalised to
constant term 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from math import gcd, lcm


class ConfigurationError(ValueError):
    """A requested root of unity or constant does not embed in Q(zeta_m)."""


def smallest_prime_factor(n: int) -> int:
    if n < 2:
        raise ValueError(f"{n} has no prime factor")
    d = 2
    while d * d <= n:
        if n % d == 0:
            return d
        d += 1
    return n


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, r) with q = p^r, or raise if q is not a prime power."""
    p = smallest_prime_factor(q)
    r, rest = 0, q
    while rest % p == 0:
        rest //= p
        r += 1
    if rest != 1:
        raise ValueError(f"q={q} is not a prime power")
    return p, r


def wild_exponent(p: int, max_level: int) -> int:
    """Exponent of (1+P)/(1+P^(L+1)) in F_q((t)), i.e. least p^a > L."""
    e = p
    while e <= max_level:
        e *= p
    return e


def session_order(q: int, m_zeta: int = 8, max_wild_level: int = 4) -> int:
    """Cyclotomic order m used for a whole session.

    It contains the values of psi_F (p-th roots), every character of
    F_{q^2}^x, the configured zeta parameters, and the p-power roots needed
    by wild characters up to ``max_wild_level``.  A factor 4 is forced so
    that sqrt(q) is available.
    """
    p, _ = prime_power(q)
    return lcm(wild_exponent(p, max_wild_level), q * q - 1, m_zeta, 4)


def _poly_divmod_int(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    # den monic
    num = num[:]
    out = [0] * max(len(num) - len(den) + 1, 1)
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1]
        if c:
            out[i] = c
            for j, dj in enumerate(den):
                num[i + j] -= c * dj
    return out, num[: len(den) - 1]


@cache
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Coefficients (low to high) of the m-th cyclotomic polynomial."""
    poly = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            poly, rem = _poly_divmod_int(poly, list(cyclotomic_polynomial(d)))
            assert not any(rem)
    while poly and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


class CyclotomicField:
    """Q(zeta_m) with precomputed reduction tables."""

    __slots__ = ("m", "phi", "modulus", "powers", "_inv_cache", "zero", "one")

    def __init__(self, m: int):
        self.m = m
        self.modulus = cyclotomic_polynomial(m)
        self.phi = len(self.modulus) - 1
        top = max(m, 2 * self.phi)
        powers = []
        vec = [1] + [0] * (self.phi - 1)
        for _ in range(top):
            powers.append(tuple(vec))
            # multiply by zeta and reduce
            carry = vec[-1]
            vec = [0] + vec[:-1]
            if carry:
                for i in range(self.phi):
                    vec[i] -= carry * self.modulus[i]
        self.powers = tuple(powers)
        self._inv_cache: dict = {}
        self.zero = Scalar(self, (0,) * self.phi, 1)
        self.one = Scalar(self, (1,) + (0,) * (self.phi - 1), 1)

    def __repr__(self):
        return f"CyclotomicField({self.m})"

    def __reduce__(self):
        return (cyclotomic_field, (self.m,))

    def reduce(self, coeffs: list[int]) -> list[int]:
        phi = self.phi
        out = list(coeffs[:phi]) + [0] * max(0, phi - len(coeffs))
        for e in range(phi, len(coeffs)):
            c = coeffs[e]
            if c:
                row = self.powers[e]
                for i in range(phi):
                    if row[i]:
                        out[i] += c * row[i]
        return out

    def rational(self, r) -> "Scalar":
        r = Fraction(r)
        return Scalar.normalised(self, [r.numerator] + [0] * (self.phi - 1), r.denominator)

    def root(self, order: int, exponent: int) -> "Scalar":
        return scalar_root_of_unity(self, order, exponent)

    def zeta_power(self, e: int) -> "Scalar":
        return Scalar(self, self.powers[e % self.m], 1)

    def sqrt_q(self, q: int) -> "Scalar":
        return sqrt_prime_power(self, q)


@cache
def cyclotomic_field(m: int) -> CyclotomicField:
    return CyclotomicField(m)


class Scalar:
    """Exact element of Q(zeta_m); immutable."""

    __slots__ = ("field", "nums", "den", "_hash")

    def __init__(self, field: CyclotomicField, nums, den: int):
        self.field = field
        self.nums = tuple(nums)
        self.den = den
        self._hash = None

    @classmethod
    def normalised(cls, field, nums, den) -> "Scalar":
        if den < 0:
            nums = [-x for x in nums]
            den = -den
        g = den
        for x in nums:
            if x:
                g = gcd(g, x)
                if g == 1:
                    break
        if not any(nums):
            return cls(field, (0,) * field.phi, 1)
        if g != 1:
            nums = [x // g for x in nums]
            den //= g
        return cls(field, nums, den)

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.field is not self.field:
                raise ConfigurationError("scalars from different cyclotomic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.rational(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.den == o.den:
            return Scalar.normalised(self.field, [a + b for a, b in zip(self.nums, o.nums)], self.den)
        return Scalar.normalised(
            self.field,
            [a * o.den + b * self.den for a, b in zip(self.nums, o.nums)],
            self.den * o.den,
        )

    __radd__ = __add__

    def __neg__(self):
        return Scalar(self.field, tuple(-a for a in self.nums), self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b = self.nums, o.nums
        prod = [0] * (2 * len(a) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return Scalar.normalised(self.field, self.field.reduce(prod), self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero scalar")
        cache_ = self.field._inv_cache
        hit = cache_.get(self)
        if hit is not None:
            return hit
        phi = self.field.phi
        # columns: self * zeta^j
        cols = []
        for j in range(phi):
            v = [0] * (phi + j)
            for i, x in enumerate(self.nums):
                v[i + j] = x
            cols.append(self.field.reduce(v))
        rows = [[Fraction(cols[j][i]) for j in range(phi)] + [Fraction(int(i == 0))] for i in range(phi)]
        _solve_in_place(rows)
        sol = [rows[i][phi] for i in range(phi)]
        den = lcm(*(s.denominator for s in sol))
        nums = [int(s * den) for s in sol]
        # self = nums/den scaled by self.den: (a/d)^{-1} = d * a^{-1}
        res = Scalar.normalised(self.field, [x * self.den for x in nums], den)
        if len(cache_) < 4096:
            cache_[self] = res
        return res

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = self.field.one, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # comparison -----------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.nums)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.rational(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.field.m == other.field.m and self.den == other.den and self.nums == other.nums

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field.m, self.den, self.nums))
        return self._hash

    def as_rational(self) -> Fraction | None:
        if any(self.nums[1:]):
            return None
        return Fraction(self.nums[0], self.den)

    def root_exponent(self) -> int | None:
        """e with self == zeta_m^e, or None if self is not an m-th root of unity."""
        if self.den != 1:
            return None
        for e, row in enumerate(self.field.powers[: self.field.m]):
            if row == self.nums:
                return e
        return None

    def rational_times_root(self) -> tuple[Fraction, int] | None:
        """(r, e) with self == r * zeta_m^e, r > 0 rational, or None."""
        if self.is_zero():
            return None
        for e in range(self.field.m):
            r = (self * self.field.zeta_power(-e)).as_rational()
            if r is not None and r > 0:
                return r, e
        return None

    def pretty(self) -> str:
        """r*zeta_m^e when possible, else the raw coefficient vector."""
        re_ = self.rational_times_root()
        if re_ is None:
            return self.to_text()
        r, e = re_
        return f"{r}*zeta_{self.field.m}^{e}" if e else str(r)

    # serialisation --------------------------------------------------------
    def to_text(self) -> str:
        return f"{self.field.m}:{self.den}:" + ",".join(str(x) for x in self.nums)

    @classmethod
    def from_text(cls, text: str) -> "Scalar":
        m, den, nums = text.split(":")
        field = cyclotomic_field(int(m))
        vals = [int(x) for x in nums.split(",")]
        if len(vals) != field.phi:
            raise ValueError("coefficient vector has wrong length")
        return cls.normalised(field, vals, int(den))

    def __repr__(self):
        r = self.as_rational()
        if r is not None:
            return f"Scalar({r})"
        e = self.root_exponent()
        if e is not None:
            return f"Scalar(zeta_{self.field.m}^{e})"
        return f"Scalar({self.to_text()})"


def _solve_in_place(rows: list[list[Fraction]]) -> None:
    n = len(rows)
    for col in range(n):
        piv = next(r for r in range(col, n) if rows[r][col] != 0)
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = 1 / rows[col][col]
        rows[col] = [x * inv for x in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]


def scalar_root_of_unity(field: CyclotomicField, order: int, exponent: int) -> Scalar:
    """zeta_order^exponent as an element of Q(zeta_m)."""
    if order <= 0 or field.m % order:
        raise ConfigurationError(
            f"root of unity of order {order} needs m divisible by {order}; session m={field.m} "
            f"(required m at least lcm({field.m}, {order}) = {lcm(field.m, order)})"
        )
    return field.zeta_power((field.m // order) * exponent)


def sqrt_prime_power(field: CyclotomicField, q: int) -> Scalar:
    p, r = prime_power(q)
    outer = field.rational(p ** (r // 2))
    if r % 2 == 0:
        return outer
    if p == 2:
        z8 = scalar_root_of_unity(field, 8, 1)
        return outer * (z8 + z8.inverse())
    zp = lambda a: scalar_root_of_unity(field, p, a)  # noqa: E731
    gauss = field.zero
    for a in range(1, p):
        legendre = 1 if pow(a, (p - 1) // 2, p) == 1 else -1
        gauss = gauss + legendre * zp(a)
    if p % 4 == 1:
        return outer * gauss
    i = scalar_root_of_unity(field, 4, 1)
    return outer * (-(i * gauss))


class RootSum:
    """Accumulator for sums of weighted m-th roots of unity.

    Adding a term is a dictionary update, which keeps large character sums
    cheap; conversion to a Scalar happens once at the end.
    """

    __slots__ = ("field", "terms")

    def __init__(self, field: CyclotomicField):
        self.field = field
        self.terms: dict[int, Fraction] = {}

    def add(self, exponent: int, weight=1) -> None:
        e = exponent % self.field.m
        self.terms[e] = self.terms.get(e, 0) + weight

    def to_scalar(self) -> Scalar:
        f = self.field
        den = 1
        for w in self.terms.values():
            den = lcm(den, Fraction(w).denominator)
        acc = [0] * f.phi
        for e, w in self.terms.items():
            w = Fraction(w) * den
            if w:
                row = f.powers[e]
                wi = int(w)
                for i in range(f.phi):
                    if row[i]:
                        acc[i] += wi * row[i]
        return Scalar.normalised(f, acc, den)


# ---------------------------------------------------------------------------
# Laurent polynomials and rational functions in X


class LaurentPoly:
    """Finite sum of c_e X^e with nonzero Scalar coefficients."""

    __slots__ = ("field", "terms")

    def __init__(self, field: CyclotomicField, terms: dict[int, Scalar] | None = None):
        self.field = field
        self.terms = {e: c for e, c in (terms or {}).items() if not c.is_zero()}

    @classmethod
    def monomial(cls, coeff: Scalar, degree: int) -> "LaurentPoly":
        return cls(coeff.field, {degree: coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def low(self) -> int:
        return min(self.terms)

    def high(self) -> int:
        return max(self.terms)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return LaurentPoly(self.field, out)

    def __neg__(self):
        return LaurentPoly(self.field, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Scalar):
            return LaurentPoly(self.field, {e: c * other for e, c in self.terms.items()})
        out: dict[int, Scalar] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                out[e] = out[e] + c1 * c2 if e in out else c1 * c2
        return LaurentPoly(self.field, out)

    def shift(self, k: int) -> "LaurentPoly":
        return LaurentPoly(self.field, {e + k: c for e, c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, LaurentPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items(), key=lambda t: t[0])))

    def as_list(self) -> list[Scalar]:
        """Dense coefficients from degree 0 (requires low() >= 0)."""
        if self.is_zero():
            return []
        out = [self.field.zero] * (self.high() + 1)
        for e, c in self.terms.items():
            out[e] = c
        return out

    @classmethod
    def from_list(cls, field, coeffs, shift: int = 0) -> "LaurentPoly":
        return cls(field, {i + shift: c for i, c in enumerate(coeffs)})

    def __repr__(self):
        return " + ".join(f"{c!r}*X^{e}" for e, c in sorted(self.terms.items())) or "0"


def _poly_divmod(a: list[Scalar], b: list[Scalar]):
    field = b[0].field
    a = a[:]
    inv_lead = b[-1].inverse()
    quot = [field.zero] * max(len(a) - len(b) + 1, 1)
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] * inv_lead
        if not c.is_zero():
            quot[i] = c
            for j, bj in enumerate(b):
                a[i + j] = a[i + j] - c * bj
    rem = a[: len(b) - 1]
    while rem and rem[-1].is_zero():
        rem.pop()
    return quot, rem


def _poly_gcd(a: list[Scalar], b: list[Scalar]) -> list[Scalar]:
    while b:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    inv = a[-1].inverse()
    return [c * inv for c in a]


class RationalFnX:
    """num/den in lowest terms with den(0) = 1 and den a polynomial in X."""

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: LaurentPoly | None = None):
        field = num.field
        if den is None:
            den = LaurentPoly(field, {0: field.one})
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            self.num, self.den = num, LaurentPoly(field, {0: field.one})
            return
        # strip powers of X
        shift = num.low() - den.low()
        n = num.shift(-num.low()).as_list()
        d = den.shift(-den.low()).as_list()
        if len(d) > 1:
            g = _poly_gcd(n, d)
            if len(g) > 1:
                n, _ = _poly_divmod(n, g)
                d, _ = _poly_divmod(d, g)
        c0 = d[0].inverse()
        n = [x * c0 for x in n]
        d = [x * c0 for x in d]
        self.num = LaurentPoly.from_list(field, n, shift)
        self.den = LaurentPoly.from_list(field, d)

    @property
    def field(self):
        return self.num.field

    @classmethod
    def monomial(cls, coeff: Scalar, degree: int) -> "RationalFnX":
        return cls(LaurentPoly.monomial(coeff, degree))

    @classmethod
    def constant(cls, c: Scalar) -> "RationalFnX":
        return cls.monomial(c, 0)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other):
        return RationalFnX(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self):
        return RationalFnX(-self.num, self.den)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Scalar):
            return RationalFnX(self.num * other, self.den)
        return RationalFnX(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        if isinstance(other, Scalar):
            return RationalFnX(self.num * other.inverse(), self.den)
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFnX(self.num * other.den, self.den * other.num)

    def __pow__(self, e: int):
        if e < 0:
            one = RationalFnX.constant(self.field.one)
            return one / (self ** (-e))
        out = RationalFnX.constant(self.field.one)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, RationalFnX) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def substitute_reflection(self, q: int) -> "RationalFnX":
        """f(X) -> f(q^-1 X^-1), i.e. s -> 1 - s."""
        field = self.field
        qinv = field.rational(Fraction(1, q))

        def refl(poly: LaurentPoly) -> LaurentPoly:
            return LaurentPoly(field, {-e: c * qinv ** e for e, c in poly.terms.items()})

        return RationalFnX(refl(self.num), refl(self.den))

    def to_json(self) -> dict:
        return {
            "num": [[e, c.to_text()] for e, c in sorted(self.num.terms.items())],
            "den": [[e, c.to_text()] for e, c in sorted(self.den.terms.items())],
        }

    @classmethod
    def from_json(cls, data: dict) -> "RationalFnX":
        num = {e: Scalar.from_text(t) for e, t in data["num"]}
        den = {e: Scalar.from_text(t) for e, t in data["den"]}
        field = next(iter((num or den).values())).field
        return cls(LaurentPoly(field, num), LaurentPoly(field, den))

    def __repr__(self):
        return f"({self.num!r}) / ({self.den!r})"


@dataclass(frozen=True)
class GammaMonomial:
    coefficient: Scalar
    degree: int

    def to_json(self) -> dict:
        return {"coefficient": self.coefficient.to_text(), "degree": self.degree}


class NotMonomial:
    """Marker returned by as_monomial for non-monomial rational functions."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NotMonomial"

    def __bool__(self):
        return False


NOT_MONOMIAL = NotMonomial()


def as_monomial(f: RationalFnX) -> GammaMonomial | NotMonomial:
    if f.is_zero():
        raise ValueError("as_monomial of the zero function")
    if len(f.den.terms) != 1 or len(f.num.terms) != 1:
        return NOT_MONOMIAL
    (e, c), = f.num.terms.items()
    return GammaMonomial(c, e)
