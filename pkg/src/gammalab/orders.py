"""Matrices over F, lattice-chain orders, special elements and volumes.

Both orders used here come from a lattice chain of period e in F^n with
index function r(a) = a, which makes the j-th radical power the set of
matrices x with

    val x[a][b] >= ceil((j + a - b) / e)          (0-indexed a, b).

With n = 2N, e = N this is the order A_2N (blocks I_N, t^-1 I_N / t I_N,
I_N); with n = e = N it is the standard Iwahori order I_N; with e = 1 it is
M_n(O).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import prod

from .characters import Session
from .localfield import DomainError, FieldElem, FiniteField, PrecisionError
from .scalars import Scalar


class LocalMatrix:
    """n x n matrix of FieldElem (rows of entries)."""

    __slots__ = ("n", "rows")

    def __init__(self, rows):
        self.rows = [list(r) for r in rows]
        self.n = len(self.rows)

    @classmethod
    def identity(cls, k: FiniteField, n: int) -> "LocalMatrix":
        one = FieldElem(k, 0, (1,), None)
        zero = FieldElem(k, 0, (), None)
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, k: FiniteField, n: int) -> "LocalMatrix":
        zero = FieldElem(k, 0, (), None)
        return cls([[zero] * n for _ in range(n)])

    @property
    def k(self) -> FiniteField:
        return self.rows[0][0].k

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def with_entry(self, i: int, j: int, value: FieldElem) -> "LocalMatrix":
        rows = [r[:] for r in self.rows]
        rows[i][j] = value
        return LocalMatrix(rows)

    def __mul__(self, other: "LocalMatrix") -> "LocalMatrix":
        cols = list(zip(*other.rows))
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = None
                for x, y in zip(r, c):
                    if x.coeffs and y.coeffs:
                        t = x * y
                        acc = t if acc is None else acc + t
                    elif (x.prec is not None and not x.coeffs) or (y.prec is not None and not y.coeffs):
                        t = x * y
                        acc = t if acc is None else acc + t
                row.append(acc if acc is not None else FieldElem(r[0].k, 0, (), None))
            out.append(row)
        return LocalMatrix(out)

    def __add__(self, other):
        return LocalMatrix([[x + y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return LocalMatrix([[x - y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def scale(self, c: FieldElem) -> "LocalMatrix":
        return LocalMatrix([[c * x for x in r] for r in self.rows])

    def transpose(self) -> "LocalMatrix":
        return LocalMatrix([list(c) for c in zip(*self.rows)])

    def truncate(self, prec: int) -> "LocalMatrix":
        return LocalMatrix([[x.with_prec(prec) for x in r] for r in self.rows])

    def inverse(self, default_prec: int = 8) -> "LocalMatrix":
        """Gauss-Jordan with minimal-valuation pivots."""
        n = self.n
        k = self.k
        a = [r[:] for r in self.rows]
        inv = LocalMatrix.identity(k, n).rows
        for col in range(n):
            best, bv = None, None
            for r in range(col, n):
                x = a[r][col]
                if x.coeffs and (bv is None or x.v < bv):
                    best, bv = r, x.v
            if best is None:
                raise PrecisionError("singular matrix (or precision too low)")
            a[col], a[best] = a[best], a[col]
            inv[col], inv[best] = inv[best], inv[col]
            pinv = a[col][col].inverse(default_prec)
            a[col] = [pinv * x for x in a[col]]
            inv[col] = [pinv * x for x in inv[col]]
            for r in range(n):
                if r != col and not a[r][col].is_exact_zero():
                    f = a[r][col]
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                    inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
        return LocalMatrix(inv)

    def det(self) -> FieldElem:
        n = self.n
        a = [r[:] for r in self.rows]
        k = self.k
        result = FieldElem(k, 0, (1,), None)
        for col in range(n):
            best, bv = None, None
            for r in range(col, n):
                x = a[r][col]
                if x.coeffs and (bv is None or x.v < bv):
                    best, bv = r, x.v
            if best is None:
                prec = min((x.prec for r in a[col:] for x in r[col:] if x.prec is not None), default=None)
                return FieldElem(k, 0, (), None) if prec is None else (result * FieldElem(k, prec, (), prec))
            if best != col:
                a[col], a[best] = a[best], a[col]
                result = -result
            p = a[col][col]
            result = result * p
            pinv = p.inverse()
            for r in range(col + 1, n):
                if not a[r][col].is_exact_zero():
                    f = a[r][col] * pinv
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
        return result

    def is_identity_mod(self, prec: int) -> bool:
        """Equal to the identity modulo t^prec in every entry."""
        for i, r in enumerate(self.rows):
            for j, x in enumerate(r):
                d = x - 1 if i == j else x
                if not d.val_at_least(prec):
                    return False
        return True

    def agrees_with(self, other: "LocalMatrix") -> bool:
        return all(x.agrees_with(y) for r, s in zip(self.rows, other.rows) for x, y in zip(r, s))

    def __eq__(self, other):
        return isinstance(other, LocalMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(tuple(tuple(r) for r in self.rows))

    def to_text(self) -> str:
        return "\n".join(" | ".join(x.to_text() for x in r) for r in self.rows)

    def __repr__(self):
        return "LocalMatrix(\n" + self.to_text() + "\n)"


def matrix_from(S: Session, entries: dict[tuple[int, int], FieldElem], n: int, diag_one: bool = False) -> LocalMatrix:
    m = LocalMatrix.identity(S.k, n) if diag_one else LocalMatrix.zeros(S.k, n)
    rows = m.rows
    for (i, j), v in entries.items():
        rows[i][j] = v
    return LocalMatrix(rows)


def diag(S: Session, values) -> LocalMatrix:
    values = list(values)
    return matrix_from(S, {(i, i): v for i, v in enumerate(values)}, len(values))


def block_diag(S: Session, a: LocalMatrix, b: LocalMatrix) -> LocalMatrix:
    n = a.n + b.n
    m = LocalMatrix.zeros(S.k, n).rows
    for i in range(a.n):
        for j in range(a.n):
            m[i][j] = a.rows[i][j]
    for i in range(b.n):
        for j in range(b.n):
            m[a.n + i][a.n + j] = b.rows[i][j]
    return LocalMatrix(m)


def permutation_matrix(S: Session, perm: list[int]) -> LocalMatrix:
    """Matrix sending e_i to e_perm[i] (0-indexed)."""
    return matrix_from(S, {(perm[i], i): S.F.one() for i in range(len(perm))}, len(perm))


# ---------------------------------------------------------------------------
# orders


def ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


@dataclass(frozen=True)
class OrderSpec:
    """Radical power P^j of the lattice-chain order of size n and period e."""

    n: int
    e: int
    j: int = 0

    @classmethod
    def A2N(cls, N: int, j: int = 0) -> "OrderSpec":
        return cls(2 * N, N, j)

    @classmethod
    def I_N(cls, N: int, j: int = 0) -> "OrderSpec":
        return cls(N, N, j)

    def power(self, j: int) -> "OrderSpec":
        return OrderSpec(self.n, self.e, j)

    @cached_property
    def bounds(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(ceil_div(self.j + a - b, self.e) for b in range(self.n)) for a in range(self.n))

    def bound(self, a: int, b: int) -> int:
        return self.bounds[a][b]

    @cached_property
    def residue_positions(self) -> tuple[tuple[int, ...], ...]:
        """Index classes mod e; each gives one block of the residue algebra."""
        return tuple(tuple(a for a in range(self.n) if a % self.e == r) for r in range(self.e))

    def dim_quotient(self) -> int:
        """dim over k of P^j / P^(j+1)."""
        return self.n * self.n // self.e

    def unipotent_dim(self) -> int:
        blocks = [len(c) for c in self.residue_positions]
        return (self.n * self.n - sum(b * b for b in blocks)) // 2


def in_lattice(x: LocalMatrix, spec: OrderSpec) -> bool:
    b = spec.bounds
    for i, r in enumerate(x.rows):
        for j, v in enumerate(r):
            if not v.val_at_least(b[i][j]):
                return False
    return True


def in_unit_group(x: LocalMatrix, spec: OrderSpec, level: int) -> bool:
    """x in U^level(order) (level >= 1) or in the unit group (level 0)."""
    base = OrderSpec(spec.n, spec.e, 0)
    if level == 0:
        if not in_lattice(x, base):
            return False
        return x.det().val_at_least(0) and x.det().valuation() == 0
    b = base.power(level).bounds
    for i, r in enumerate(x.rows):
        for j, v in enumerate(r):
            d = v - 1 if i == j else v
            if not d.val_at_least(b[i][j]):
                return False
    return True


def residue_blocks(x: LocalMatrix, spec: OrderSpec) -> list[list[list[int]]]:
    """Image of x in A/P (x must lie in the order) as a list of blocks over k."""
    base = OrderSpec(spec.n, spec.e, 0).bounds
    out = []
    for cls_ in OrderSpec(spec.n, spec.e, 0).residue_positions:
        out.append([[x.rows[a][b].coefficient(base[a][b]) for b in cls_] for a in cls_])
    return out


# ---------------------------------------------------------------------------
# special elements


class MiddleElements:
    """beta_f, sigma_f, g_f, embeddings of O_L and residue maps for f = X^2 - dX - c."""

    def __init__(self, S: Session, N: int, c: FieldElem, d: FieldElem):
        if N < 2:
            raise DomainError("N >= 2 required")
        self.S, self.N, self.c, self.d = S, N, c, d
        self.n = 2 * N
        self.spec = OrderSpec.A2N(N)
        self.cbar = c.residue()
        self.dbar = d.residue()
        self.E = S.quadratic(self.cbar, self.dbar)
        F = S.F
        n = self.n
        ent = {(i + 1, i): F.one() for i in range(n - 1)}
        ent[(0, n - 1)] = c * F.uniformizer(-2)
        ent[(N, n - 1)] = d * F.uniformizer(-1)
        self.beta = matrix_from(S, ent, n)
        self._beta_pows: dict[int, LocalMatrix] = {0: LocalMatrix.identity(S.k, n)}

    def beta_power(self, k: int) -> LocalMatrix:
        if k not in self._beta_pows:
            if k > 0:
                self._beta_pows[k] = self.beta_power(k - 1) * self.beta
            else:
                self._beta_pows[k] = self.beta_power(k + 1) * self.beta_inverse
        return self._beta_pows[k]

    @cached_property
    def beta_inverse(self) -> LocalMatrix:
        # beta e_i = e_{i+1} (i < n-1), beta e_{n-1} = c t^-2 e_0 + d t^-1 e_N
        S, F, N, n = self.S, self.S.F, self.N, self.n
        cinv = self.c.inverse(S.precision + 4)
        ent = {(i, i + 1): F.one() for i in range(n - 1)}
        # beta^-1 e_0 = c^-1 t^2 (e_{n-1}... ) solve: beta(e_{n-1}) = c t^-2 e_0 + d t^-1 e_N
        ent[(n - 1, 0)] = cinv * F.uniformizer(2)
        ent[(N - 1, 0)] = -(cinv * self.d * F.uniformizer(1))
        return matrix_from(S, ent, n)

    @cached_property
    def s_perm(self) -> LocalMatrix:
        N = self.N
        perm = [2 * i for i in range(N)] + [2 * i + 1 for i in range(N)]
        return permutation_matrix(self.S, perm)

    @cached_property
    def t_f(self) -> LocalMatrix:
        F = self.S.F
        cinv = self.c.inverse(self.S.precision + 4)
        return diag(self.S, [F.one()] * self.N + [cinv * F.uniformizer(1)] * self.N)

    @cached_property
    def g_f(self) -> LocalMatrix:
        return self.t_f * self.s_perm.inverse()

    @cached_property
    def beta_standard(self) -> LocalMatrix:
        """The element conjugated by g_f to give beta_f (1-indexed rows 1, 2 and subdiagonal-2)."""
        S, F, n = self.S, self.S.F, self.n
        ent = {(0, n - 1): F.uniformizer(-1), (1, n - 2): self.c * F.uniformizer(-1), (1, n - 1): self.d * F.uniformizer(-1)}
        for i in range(2, n):
            ent[(i, i - 2)] = F.one()
        return matrix_from(S, ent, n)

    @cached_property
    def sigma(self) -> LocalMatrix:
        return self.beta_power(self.N).scale(self.S.F.uniformizer(1))

    @cached_property
    def det_val_beta(self) -> int:
        return -2

    def embed_OL(self, a0: FieldElem, a1: FieldElem) -> LocalMatrix:
        """Matrix of a0 c + a1 sigma_f in the ordered basis {c, sigma_f}."""
        S, F, N = self.S, self.S.F, self.N
        diag_top = a0 * self.c
        diag_bot = diag_top + a1 * self.d
        up = a1 * self.c * F.uniformizer(-1)
        low = a1 * F.uniformizer(1)
        ent = {}
        for i in range(N):
            ent[(i, i)] = diag_top
            ent[(N + i, N + i)] = diag_bot
            ent[(i, N + i)] = up
            ent[(N + i, i)] = low
        return matrix_from(S, ent, self.n)

    def embed_residue(self, a: int) -> LocalMatrix:
        """Constant lift of a in k_L = k[X]/(f) (X -> sigma_f)."""
        x0, x1 = self.E.parts(a)
        k = self.S.k
        # a = x0 + x1 sigma = a0 c + a1 sigma with a0 = x0 / c
        a0 = k.mul(x0, k.inv(self.cbar))
        return self.embed_OL(self.S.F.const(a0), self.S.F.const(x1))

    def residue_in_kL(self, blocks) -> int | None:
        """If every residue block is the image of one element of k_L, return it."""
        k = self.S.k
        c, d = self.cbar, self.dbar
        first = blocks[0]
        a0c, a1c = first[0][0], first[0][1]
        a1 = first[1][0]
        if a1c != k.mul(a1, c) or first[1][1] != k.add(a0c, k.mul(a1, d)):
            return None
        for b in blocks[1:]:
            if b != first:
                return None
        val = self.E.make(a0c, a1)
        return val if val else None


class SimpleElements:
    """beta_u for the Iwahori order I_N."""

    def __init__(self, S: Session, N: int, u: FieldElem):
        self.S, self.N, self.u = S, N, u
        self.n = N
        self.spec = OrderSpec.I_N(N)
        F = S.F
        uinv = u.inverse(S.precision + 4)
        ent = {(i + 1, i): F.one() for i in range(N - 1)}
        ent[(0, N - 1)] = uinv * F.uniformizer(-1)
        self.beta = matrix_from(S, ent, N)
        ient = {(i, i + 1): F.one() for i in range(N - 1)}
        ient[(N - 1, 0)] = u * F.uniformizer(1)
        self.beta_inverse = matrix_from(S, ient, N)
        self._beta_pows: dict[int, LocalMatrix] = {0: LocalMatrix.identity(S.k, N)}

    def beta_power(self, k: int) -> LocalMatrix:
        if k not in self._beta_pows:
            if k > 0:
                self._beta_pows[k] = self.beta_power(k - 1) * self.beta
            else:
                self._beta_pows[k] = self.beta_power(k + 1) * self.beta_inverse
        return self._beta_pows[k]

    det_val_beta = -1


def g_u_matrix(S: Session, N: int, u: FieldElem) -> LocalMatrix:
    """Identity plus (u t)^-1 at position (1, N+1)."""
    return matrix_from(S, {(0, N): u.inverse(S.precision + 4) * S.F.uniformizer(-1)}, 2 * N, diag_one=True)


def w_matrix(S: Session, r: int) -> LocalMatrix:
    return permutation_matrix(S, [r - 1 - i for i in range(r)])


def w_nm(S: Session, n: int, m: int) -> LocalMatrix:
    perm = list(range(m)) + [n - 1 - i for i in range(n - m)]
    return permutation_matrix(S, perm)


# ---------------------------------------------------------------------------
# volumes


def gl_order(q: int, n: int) -> int:
    return prod(q**n - q**i for i in range(n))


def volume_additive(S: Session, k: int) -> Scalar:
    """vol(P^k) for the self-dual measure: q^(1/2 - k)."""
    return S.q_power(1 - 2 * k)


def volume_multiplicative(S: Session, k: int) -> Scalar:
    """vol(1+P^k) with vol(O^x) = 1."""
    if k == 0:
        return S.K.one
    return S.rational(Fraction(S.q) ** (1 - k) / (S.q - 1))


def volume_gl(S: Session, spec: OrderSpec, level: int, haar_scale=1) -> Scalar:
    """vol(U^level(order)) for the Haar measure with vol(GL(n,O)) = haar_scale (level >= 1)."""
    if level < 1:
        raise DomainError("volume_gl covers the filtration subgroups U^m, m >= 1")
    q, n = S.q, spec.n
    index_u1 = Fraction(gl_order(q, n), q ** spec.unipotent_dim())
    index = index_u1 * q ** ((level - 1) * spec.dim_quotient())
    return S.rational(Fraction(haar_scale) / index)


def index_units_u1(S: Session, spec: OrderSpec) -> int:
    """[A^x : U^1] for the order (product of GL of the residue blocks)."""
    return prod(gl_order(S.q, len(c)) for c in spec.residue_positions)
