"""Finite fields and truncated Laurent series over F_q.

F = F_q((t)) with uniformizer t.  A FieldElem is a Laurent series known
modulo t^prec; ``prec=None`` marks an exact Laurent polynomial.

Precision rules, with v = valuation and P = absolute precision:

* sum: P = min(Px, Py);
* product: P = min(Px + vy, Py + vx) (an inexact zero counts as v = P);
* inverse of a unit-times-t^v known mod t^P: relative precision P - v is
  preserved, so the result is known mod t^(-v + (P - v)).  Exact monomials
  invert exactly; other exact elements get relative precision
  ``default_prec``.
"""
from __future__ import annotations

from functools import cache

from .scalars import prime_power


class PrecisionError(ArithmeticError):
    """A value is not determined at the available precision."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class AbovePrecision:
    """Valuation marker for a value that is zero at the known precision."""

    __slots__ = ("bound",)

    def __init__(self, bound: int):
        self.bound = bound

    def __repr__(self):
        return f">={self.bound}"

    def __eq__(self, other):
        return isinstance(other, AbovePrecision) and other.bound == self.bound

    def __hash__(self):
        return hash(("above", self.bound))


# ---------------------------------------------------------------------------
# finite fields


def _poly_mulmod_p(a, b, mod, p):
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    r = len(mod) - 1
    for i in range(len(prod) - 1, r - 1, -1):
        c = prod[i]
        if c:
            for j in range(r + 1):
                prod[i - r + j] = (prod[i - r + j] - c * mod[j]) % p
    return (prod + [0] * r)[:r]


def _is_irreducible_mod_p(poly, p):
    r = len(poly) - 1
    # brute force: no monic factor of degree <= r/2
    for deg in range(1, r // 2 + 1):
        for code in range(p**deg):
            f = [(code // p**i) % p for i in range(deg)] + [1]
            rem = list(poly)
            for i in range(len(rem) - 1, deg - 1, -1):
                c = rem[i]
                if c:
                    for j in range(deg + 1):
                        rem[i - deg + j] = (rem[i - deg + j] - c * f[j]) % p
            if not any(rem[:deg]):
                return False
    return True


class FiniteField:
    """F_q with integer-encoded elements and full operation tables.

    An element is an integer 0 <= a < q; for q = p^r the base-p digits of a
    are the coefficients of a polynomial modulo a fixed monic irreducible of
    degree r.  ``gen`` is a fixed primitive element.
    """

    def __init__(self, q: int):
        self.q = q
        self.p, self.r = prime_power(q)
        p, r = self.p, self.r
        if r == 1:
            self.modulus = (0, 1)
        else:
            for code in range(p**r):
                cand = tuple((code // p**i) % p for i in range(r)) + (1,)
                if cand[0] and _is_irreducible_mod_p(cand, p):
                    self.modulus = cand
                    break
        digits = [tuple((a // p**i) % p for i in range(r)) for a in range(q)]
        enc = {d: a for a, d in enumerate(digits)}
        self.add_t = [[enc[tuple((x + y) % p for x, y in zip(digits[a], digits[b]))] for b in range(q)] for a in range(q)]
        if r == 1:
            self.mul_t = [[(a * b) % p for b in range(q)] for a in range(q)]
        else:
            self.mul_t = [[enc[tuple(_poly_mulmod_p(list(digits[a]), list(digits[b]), self.modulus, p))]
                           for b in range(q)] for a in range(q)]
        self.neg_t = [self.add_t[a].index(0) for a in range(q)]
        self.inv_t = [0] + [self.mul_t[a].index(1) for a in range(1, q)]
        self.gen = next(g for g in range(1, q) if self._order(g) == q - 1) if q > 2 else 1
        self.exp_t = [1] * (q - 1)
        for i in range(1, q - 1):
            self.exp_t[i] = self.mul_t[self.exp_t[i - 1]][self.gen]
        self.log_t = {a: i for i, a in enumerate(self.exp_t)}
        self._digits = digits

    def _order(self, g):
        x, n = g, 1
        while x != 1:
            x = self.mul_t[x][g]
            n += 1
        return n

    def add(self, a, b):
        return self.add_t[a][b]

    def sub(self, a, b):
        return self.add_t[a][self.neg_t[b]]

    def mul(self, a, b):
        return self.mul_t[a][b]

    def neg(self, a):
        return self.neg_t[a]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in F_q")
        return self.inv_t[a]

    def log(self, a) -> int:
        """Discrete log to base ``gen``."""
        if a == 0:
            raise DomainError("log of 0")
        return self.log_t[a]

    def power(self, a, e):
        if a == 0:
            return 0 if e > 0 else (1 if e == 0 else self.inv(0))
        return self.exp_t[(self.log_t[a] * e) % (self.q - 1)]

    def from_int(self, n: int) -> int:
        """Image of the integer n in the prime field."""
        return n % self.p

    def trace_to_prime(self, a) -> int:
        """Absolute trace F_q -> F_p as an integer mod p."""
        x, acc = a, 0
        for _ in range(self.r):
            acc = self.add(acc, x)
            x = self.power(x, self.p)
        return self._digits[acc][0]

    def elements(self):
        return range(self.q)

    def units(self):
        return range(1, self.q)

    def is_square(self, a) -> bool:
        return a == 0 or self.q % 2 == 0 or self.log(a) % 2 == 0

    def __repr__(self):
        return f"FiniteField({self.q})"

    def __reduce__(self):
        return (finite_field, (self.q,))


@cache
def finite_field(q: int) -> FiniteField:
    return FiniteField(q)


def is_irreducible_quadratic(k: FiniteField, c: int, d: int) -> bool:
    """Whether X^2 - dX - c has no root in k."""
    return all(k.sub(k.sub(k.mul(x, x), k.mul(d, x)), c) != 0 for x in k.elements())


def irreducible_quadratics(k: FiniteField) -> list[tuple[int, int]]:
    """All (c, d) with X^2 - dX - c irreducible over k, in lexicographic order."""
    return [(c, d) for c in k.elements() for d in k.elements() if is_irreducible_quadratic(k, c, d)]


class QuadraticExtension:
    """k[X]/(X^2 - dX - c) for an irreducible quadratic.

    Elements are encoded a0 + q*a1 for a0 + a1*X.  ``gen`` is a fixed
    primitive element used as the base point for characters.
    """

    def __init__(self, k: FiniteField, c: int, d: int):
        if not is_irreducible_quadratic(k, c, d):
            raise DomainError("f̄ reducible over F_q")
        self.k, self.c, self.d = k, c, d
        q = k.q
        self.size = q * q
        self.X = q
        mul = [[0] * (q * q) for _ in range(q * q)]
        for a in range(q * q):
            a0, a1 = a % q, a // q
            for b in range(q * q):
                b0, b1 = b % q, b // q
                # (a0 + a1 X)(b0 + b1 X), X^2 = dX + c
                hi = k.mul(a1, b1)
                r0 = k.add(k.mul(a0, b0), k.mul(hi, c))
                r1 = k.add(k.add(k.mul(a0, b1), k.mul(a1, b0)), k.mul(hi, d))
                mul[a][b] = r0 + q * r1
        self.mul_t = mul
        order = q * q - 1
        self.gen = next(g for g in range(1, q * q) if self._order(g) == order)
        self.exp_t = [1] * order
        for i in range(1, order):
            self.exp_t[i] = mul[self.exp_t[i - 1]][self.gen]
        self.log_t = {a: i for i, a in enumerate(self.exp_t)}

    def _order(self, g):
        x, n = g, 1
        while x != 1:
            x = self.mul_t[x][g]
            n += 1
            if n > self.size:
                return 0
        return n

    def make(self, a0: int, a1: int) -> int:
        return a0 + self.k.q * a1

    def parts(self, a: int) -> tuple[int, int]:
        return a % self.k.q, a // self.k.q

    def embed(self, a: int) -> int:
        return a

    def add(self, a, b):
        a0, a1 = self.parts(a)
        b0, b1 = self.parts(b)
        return self.make(self.k.add(a0, b0), self.k.add(a1, b1))

    def mul(self, a, b):
        return self.mul_t[a][b]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in F_q2")
        return self.exp_t[(-self.log_t[a]) % (self.size - 1)]

    def log(self, a) -> int:
        if a == 0:
            raise DomainError("log of 0")
        return self.log_t[a]

    def power(self, a, e):
        return self.exp_t[(self.log_t[a] * e) % (self.size - 1)]

    def frobenius(self, a):
        return self.power(a, self.k.q) if a else 0

    def norm(self, a) -> int:
        return self.mul(a, self.frobenius(a))

    def trace(self, a) -> int:
        return self.add(a, self.frobenius(a))

    def units(self):
        return range(1, self.size)

    def __repr__(self):
        return f"QuadraticExtension(q={self.k.q}, c={self.c}, d={self.d})"


# ---------------------------------------------------------------------------
# Laurent series


class LocalField:
    """Context for F = F_q((t)) at a default working precision."""

    def __init__(self, q: int, default_prec: int = 8):
        self.k = finite_field(q)
        self.q = q
        self.p = self.k.p
        self.default_prec = default_prec

    def elem(self, coeffs, v: int = 0, prec: int | None = None) -> "FieldElem":
        return FieldElem.make(self.k, v, list(coeffs), prec)

    def const(self, a: int, prec: int | None = None) -> "FieldElem":
        return FieldElem.make(self.k, 0, [a], prec)

    def zero(self, prec: int | None = None) -> "FieldElem":
        return FieldElem.make(self.k, 0, [], prec)

    def one(self) -> "FieldElem":
        return self.const(1)

    def uniformizer(self, power: int = 1) -> "FieldElem":
        return FieldElem.make(self.k, power, [1], None)

    def __repr__(self):
        return f"LocalField(q={self.q}, P={self.default_prec})"


class FieldElem:
    """Element of F_q((t)) known modulo t^prec (exact when prec is None)."""

    __slots__ = ("k", "v", "coeffs", "prec")

    def __init__(self, k: FiniteField, v: int, coeffs: tuple, prec: int | None):
        self.k, self.v, self.coeffs, self.prec = k, v, coeffs, prec

    @classmethod
    def make(cls, k, v, coeffs, prec):
        i = 0
        n = len(coeffs)
        while i < n and coeffs[i] == 0:
            i += 1
        if prec is not None:
            keep = prec - v
            j = min(n, keep)
            while j > i and coeffs[j - 1] == 0:
                j -= 1
            if j <= i:
                return cls(k, prec, (), prec)
            return cls(k, v + i, tuple(coeffs[i:j]), prec)
        if i == n:
            return cls(k, 0, (), None)
        j = n
        while coeffs[j - 1] == 0:
            j -= 1
        return cls(k, v + i, tuple(coeffs[i:j]), None)

    # queries -------------------------------------------------------------
    def is_zero(self) -> bool:
        """Zero at the known precision."""
        return not self.coeffs

    def is_exact_zero(self) -> bool:
        return not self.coeffs and self.prec is None

    def is_exact(self) -> bool:
        return self.prec is None

    def val(self):
        if not self.coeffs:
            return AbovePrecision(self.prec) if self.prec is not None else AbovePrecision(10**9)
        return self.v

    def valuation(self) -> int:
        """Valuation as an int; raises PrecisionError for an inexact zero."""
        if not self.coeffs:
            raise PrecisionError(f"valuation undetermined (zero mod t^{self.prec})")
        return self.v

    def val_at_least(self, bound: int) -> bool:
        """Decide val(x) >= bound, refusing when precision does not allow it."""
        if self.coeffs:
            return self.v >= bound
        if self.prec is None or self.prec >= bound:
            return True
        raise PrecisionError(f"cannot decide val >= {bound} from a zero mod t^{self.prec}")

    def coefficient(self, e: int) -> int:
        if self.prec is not None and e >= self.prec:
            raise PrecisionError(f"coefficient of t^{e} unknown (precision {self.prec})")
        i = e - self.v
        if self.coeffs and 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    def residue(self) -> int:
        if self.coeffs and self.v < 0:
            raise DomainError("residue of a non-integral element")
        return self.coefficient(0)

    def leading(self) -> int:
        if not self.coeffs:
            raise PrecisionError("leading coefficient of zero")
        return self.coeffs[0]

    # arithmetic ----------------------------------------------------------
    def _check(self, other):
        if isinstance(other, int):
            return FieldElem.make(self.k, 0, [other % self.k.q] if other else [], None)
        return other

    def __add__(self, other):
        other = self._check(other)
        k = self.k
        ps, po = self.prec, other.prec
        prec = ps if po is None else (po if ps is None else min(ps, po))
        if not self.coeffs and not other.coeffs:
            return FieldElem(k, prec if prec is not None else 0, (), prec)
        lo = min(x.v for x in (self, other) if x.coeffs)
        hi = max(x.v + len(x.coeffs) for x in (self, other) if x.coeffs)
        if prec is not None:
            hi = min(hi, prec)
        if hi <= lo:
            return FieldElem(k, prec, (), prec)
        out = [0] * (hi - lo)
        for x in (self, other):
            off = x.v - lo
            for i, c in enumerate(x.coeffs):
                j = off + i
                if j >= len(out):
                    break
                if c:
                    out[j] = k.add_t[out[j]][c]
        return FieldElem.make(k, lo, out, prec)

    __radd__ = __add__

    def __neg__(self):
        n = self.k.neg_t
        return FieldElem(self.k, self.v, tuple(n[c] for c in self.coeffs), self.prec)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        k = self.k
        vx = self.v if self.coeffs else self.prec
        vy = other.v if other.coeffs else other.prec
        if (not self.coeffs and self.prec is None) or (not other.coeffs and other.prec is None):
            return FieldElem(k, 0, (), None)
        cands = []
        if self.prec is not None:
            cands.append(self.prec + vy)
        if other.prec is not None:
            cands.append(other.prec + vx)
        prec = min(cands) if cands else None
        if not self.coeffs or not other.coeffs:
            return FieldElem(k, prec, (), prec)
        v = vx + vy
        length = len(self.coeffs) + len(other.coeffs) - 1
        if prec is not None:
            length = min(length, prec - v)
            if length <= 0:
                return FieldElem(k, prec, (), prec)
        out = [0] * length
        add, mul = k.add_t, k.mul_t
        b = other.coeffs
        for i, x in enumerate(self.coeffs):
            if i >= length:
                break
            if x:
                row = mul[x]
                for j in range(min(len(b), length - i)):
                    y = b[j]
                    if y:
                        out[i + j] = add[out[i + j]][row[y]]
        return FieldElem.make(k, v, out, prec)

    __rmul__ = __mul__

    def inverse(self, default_prec: int = 8) -> "FieldElem":
        k = self.k
        if not self.coeffs:
            raise ZeroDivisionError("inverse of zero (within precision)")
        v = self.v
        if self.prec is None and len(self.coeffs) == 1:
            return FieldElem(k, -v, (k.inv(self.coeffs[0]),), None)
        rel = default_prec if self.prec is None else self.prec - v
        a = list(self.coeffs[:rel]) + [0] * max(0, rel - len(self.coeffs))
        inv0 = k.inv(a[0])
        out = [0] * rel
        for n in range(rel):
            acc = 1 if n == 0 else 0
            # acc = delta_n0 - sum_{i>=1} a_i out_{n-i}
            for i in range(1, n + 1):
                if a[i] and out[n - i]:
                    acc = k.sub(acc, k.mul(a[i], out[n - i]))
            out[n] = k.mul(acc, inv0)
        return FieldElem.make(k, -v, out, -v + rel)

    def __truediv__(self, other):
        other = self._check(other)
        return self * other.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = FieldElem(self.k, 0, (1,), None)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def shift(self, n: int) -> "FieldElem":
        """Multiply by t^n."""
        return FieldElem(self.k, self.v + n, self.coeffs, None if self.prec is None else self.prec + n)

    def truncate(self, prec: int) -> "FieldElem":
        if self.prec is not None and self.prec < prec:
            raise PrecisionError(f"cannot raise precision from {self.prec} to {prec}")
        return FieldElem.make(self.k, self.v, list(self.coeffs), prec)

    def with_prec(self, prec: int) -> "FieldElem":
        """Truncate to prec when known at least that far, else keep as is."""
        if self.prec is not None and self.prec <= prec:
            return self
        return FieldElem.make(self.k, self.v, list(self.coeffs), prec)

    def scale(self, a: int) -> "FieldElem":
        """Multiply by a constant of F_q."""
        if a == 0:
            return FieldElem(self.k, 0, (), None) if self.prec is None else FieldElem(self.k, self.prec, (), self.prec)
        row = self.k.mul_t[a]
        return FieldElem(self.k, self.v, tuple(row[c] for c in self.coeffs), self.prec)

    # comparison ----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, int):
            other = self._check(other)
        if not isinstance(other, FieldElem):
            return NotImplemented
        return (self.v, self.coeffs, self.prec) == (other.v, other.coeffs, other.prec)

    def __hash__(self):
        return hash((self.v, self.coeffs, self.prec))

    def agrees_with(self, other: "FieldElem") -> bool:
        """Equal modulo the smaller of the two precisions."""
        return (self - other).is_zero()

    # text form -----------------------------------------------------------
    def to_text(self) -> str:
        tail = "" if self.prec is None else f" mod t^{self.prec}"
        if not self.coeffs:
            return "0" + tail
        terms = []
        for i, c in enumerate(self.coeffs):
            terms.append(str(c) if i == 0 else (f"{c}*t" if i == 1 else f"{c}*t^{i}"))
        return f"t^{self.v}*(" + " + ".join(terms) + ")" + tail

    @classmethod
    def from_text(cls, k: FiniteField, text: str) -> "FieldElem":
        text = text.strip()
        prec = None
        if " mod t^" in text:
            text, p = text.split(" mod t^")
            prec = int(p)
        text = text.strip()
        if text == "0":
            return cls.make(k, 0, [], prec)
        head, body = text.split("*(", 1)
        v = int(head[2:])
        body = body.rstrip(")")
        coeffs = []
        for i, term in enumerate(body.split(" + ")):
            c = int(term.split("*")[0])
            coeffs.append(c)
            if i >= 1:
                exp = 1 if term.endswith("*t") else int(term.split("^")[1])
                if exp != i:
                    raise ValueError(f"malformed term {term!r}")
        return cls.make(k, v, coeffs, prec)

    def __repr__(self):
        return f"FieldElem({self.to_text()})"
