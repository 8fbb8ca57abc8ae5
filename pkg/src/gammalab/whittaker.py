"""Whittaker functions attached to the two families of extended simple types.

W(u * beta^k * j) = psi_n(u) * Lambda(beta^k j) and W vanishes off N * J~.
The support decision is exact: given g we find u0 in N with u0^-1 g in
P^-k (row reduction), then search the finite set (N cap A)/(N cap P) for
the unipotent correction that brings the residue into the image of k_L^x.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .characters import Session, psi_exponent
from .localfield import FieldElem, PrecisionError
from .orders import (
    LocalMatrix,
    MiddleElements,
    OrderSpec,
    SimpleElements,
    g_u_matrix,
    in_unit_group,
    residue_blocks,
    w_matrix,
)
from .types_supercuspidal import MiddleParams, SimpleParams, psi_beta_exponent


class NotInSupport(Exception):
    pass


class CostGuardExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# linear algebra over F with lattice targets


def _solve_coset(v, rows, bound_row, n, track=False):
    """Reduce v modulo span_F(rows) into the lattice {x : val x_b >= bound_row[b]}.

    Returns the reduced vector (pivot coordinates zeroed) or None when
    (v + span) misses the lattice.  With track, returns (reduced, c) where
    v = reduced + sum c_j rows_j.
    """
    scaled_v = [v[b].shift(-bound_row[b]) for b in range(n)]
    R = [[r[b].shift(-bound_row[b]) for b in range(n)] for r in rows]
    m = len(rows)
    zero = FieldElem.make(v[0].k, 0, [], None)
    one = FieldElem.make(v[0].k, 0, [1], None)
    C = [[one if a == b else zero for b in range(m)] for a in range(m)] if track else None
    acc = [zero] * m
    pivots: list[tuple[list, int]] = []
    used_cols: set[int] = set()
    todo = list(range(len(R)))
    while todo:
        best = None
        fuzzy = None
        for ri in todo:
            for b in range(n):
                if b in used_cols:
                    continue
                x = R[ri][b]
                if x.coeffs:
                    if best is None or x.v < best[0]:
                        best = (x.v, ri, b)
                elif x.prec is not None and (fuzzy is None or x.prec < fuzzy):
                    fuzzy = x.prec
        if best is None:
            if fuzzy is not None:
                raise PrecisionError("pivot undetermined")
            break
        if fuzzy is not None and fuzzy < best[0]:
            raise PrecisionError("pivot undetermined")
        _, ri, b = best
        inv = R[ri][b].inverse()
        row = [x * inv for x in R[ri]]
        row[b] = one
        crow = [x * inv for x in C[ri]] if track else None
        todo.remove(ri)
        for other in todo:
            f = R[other][b]
            if not f.is_exact_zero():
                R[other] = [x - f * y for x, y in zip(R[other], row)]
                if track:
                    C[other] = [x - f * y for x, y in zip(C[other], crow)]
        for prow, pb, pc in pivots:
            f = prow[b]
            if not f.is_exact_zero():
                prow[:] = [x - f * y for x, y in zip(prow, row)]
                if track:
                    pc[:] = [x - f * y for x, y in zip(pc, crow)]
        pivots.append((row, b, crow))
        used_cols.add(b)
    for prow, pb, pc in pivots:
        f = scaled_v[pb]
        if not f.is_exact_zero():
            scaled_v = [x - f * y for x, y in zip(scaled_v, prow)]
            if track:
                acc = [x + f * y for x, y in zip(acc, pc)]
        scaled_v[pb] = zero
    for b in range(n):
        if b not in used_cols and not scaled_v[b].val_at_least(0):
            return None
    red = [scaled_v[b].shift(bound_row[b]) for b in range(n)]
    return (red, acc) if track else red


def reduce_to_lattice(g: LocalMatrix, spec: OrderSpec, shift_identity: bool = False, with_u: bool = False):
    """Find X = u^-1 g (u upper unipotent) with X in the lattice `spec`.

    With shift_identity the target is 1 + lattice instead.  Returns X or None;
    with_u returns (X, superdiagonal of u).
    """
    n = g.n
    b = spec.bounds
    k = g.k
    one = FieldElem.make(k, 0, [1], None)
    final: list[list] = [None] * n
    superdiag: list = [None] * (n - 1)
    for i in range(n - 1, -1, -1):
        v = list(g.rows[i])
        if shift_identity:
            v[i] = v[i] - one
        lower = [final[j] for j in range(i + 1, n)]
        red = _solve_coset(v, lower, b[i], n, track=with_u)
        if red is None:
            return None
        if with_u:
            red, c = red
            if c:
                superdiag[i] = c[0]
        if shift_identity:
            red[i] = red[i] + one
        final[i] = red
    if with_u:
        return LocalMatrix(final), superdiag
    return LocalMatrix(final)


def psi_n_exponent(S: Session, u: LocalMatrix) -> int:
    acc = None
    for i in range(u.n - 1):
        x = u.rows[i][i + 1]
        acc = x if acc is None else acc + x
    return 0 if acc is None else psi_exponent(S, acc)


# ---------------------------------------------------------------------------
# decomposition g = u * beta^k * a * y


@dataclass(frozen=True)
class WData:
    """Raw ingredients of a support point: psi_n(u), k, residue of a, psi_beta(y)."""

    psi_u: int
    k: int
    residue: int
    psi_beta: int


def _correction_family(E) -> list[LocalMatrix]:
    """Representatives of (N cap A) / (N cap P)."""
    spec0 = E.spec.power(0).bounds
    spec1 = E.spec.power(1).bounds
    n = E.n
    k = E.S.k
    slots = [(a, b, l) for a in range(n) for b in range(a + 1, n) for l in range(spec0[a][b], spec1[a][b])]
    out = []
    for code in itertools.product(range(k.q), repeat=len(slots)):
        rows = LocalMatrix.identity(k, n).rows
        for (a, b, l), c in zip(slots, code):
            if c:
                rows[a][b] = rows[a][b] + FieldElem.make(k, l, [c], None)
        out.append(LocalMatrix(rows))
    return out


def _residue_unit(E, z: LocalMatrix):
    blocks = residue_blocks(z, E.spec)
    if isinstance(E, MiddleElements):
        return E.residue_in_kL(blocks)
    x = blocks[0][0][0]
    if x == 0 or any(b[0][0] != x for b in blocks):
        return None
    return x


def _unit_inverse_matrix(E, a: int) -> LocalMatrix:
    if isinstance(E, MiddleElements):
        return E.embed_residue(E.E.inv(a))
    S = E.S
    return LocalMatrix.identity(S.k, E.n).scale(S.F.const(S.k.inv(a)))


def decompose(E, g: LocalMatrix) -> WData | None:
    """Exact support decision for N * J~ (J~ given by the family elements E)."""
    S = E.S
    dv = g.det().valuation()
    if dv % E.det_val_beta:
        return None
    k = dv // E.det_val_beta
    red = reduce_to_lattice(g, E.spec.power(-k), with_u=True)
    if red is None:
        return None
    X, sup = red
    # g = u0 X; the candidates are beta^-k n^-1 X with u = u0 n
    for nn_psi, corr in _corrections_for(E, k):
        z = corr * X
        a = _residue_unit(E, z)
        if a is None:
            continue
        y = _unit_inverse_matrix(E, a) * z
        if not in_unit_group(y, E.spec, 1):
            continue
        acc = None
        for x in sup:
            acc = x if acc is None else acc + x
        psi_u = 0 if acc is None else psi_exponent(S, acc)
        return WData((psi_u + nn_psi) % S.m, k, a, psi_beta_exponent(S, y, E.beta))
    return None


def _corrections_for(E, k: int):
    """[(psi_n(n), beta^-k n^-1)] over the correction family, cached per k."""
    cache = E.__dict__.setdefault("_corr_by_k", {})
    if k not in cache:
        if not hasattr(E, "_corrections"):
            E._corrections = _correction_family(E)
        bmk = E.beta_power(-k)
        out = []
        for idx, nn in enumerate(E._corrections):
            corr = bmk if idx == 0 else bmk * nn.inverse()
            out.append((psi_n_exponent(E.S, nn), corr))
        cache[k] = out
    return cache[k]


# ---------------------------------------------------------------------------


@dataclass
class WhittakerFn:
    """g -> W_base(phi(g) * right) with phi the identity or g -> w * g^-T.

    family is "middle" or "simple"; conj selects the psi^-1 model for the
    simple family.
    """

    S: Session
    family: str
    params: object
    N: int
    conj: bool = False
    tilde_flag: bool = False
    right: LocalMatrix | None = None
    elements: object = field(default=None, repr=False)

    def __post_init__(self):
        if self.elements is None:
            if self.family == "middle":
                self.params.check(self.S)
                self.elements = MiddleElements(self.S, self.N, self.params.c, self.params.d)
            else:
                self.elements = SimpleElements(self.S, self.N, self.params.u)

    @classmethod
    def middle(cls, S: Session, N: int, p: MiddleParams) -> "WhittakerFn":
        return cls(S, "middle", p, N)

    @classmethod
    def simple(cls, S: Session, N: int, p: SimpleParams, conj: bool = False) -> "WhittakerFn":
        return cls(S, "simple", p, N, conj)

    @property
    def n(self) -> int:
        return self.elements.n

    def _copy(self, tilde_flag, right) -> "WhittakerFn":
        obj = WhittakerFn.__new__(WhittakerFn)
        obj.__dict__.update(self.__dict__)
        obj.tilde_flag, obj.right = tilde_flag, right
        return obj

    def with_params(self, params) -> "WhittakerFn":
        """Same support data, other values: params must share f-bar (middle) or u (simple)."""
        obj = self._copy(self.tilde_flag, self.right)
        obj.params = params
        return obj

    def tilde(self) -> "WhittakerFn":
        return self._copy(not self.tilde_flag, self.right)

    def right_translate(self, g0: LocalMatrix) -> "WhittakerFn":
        r = self.right
        if self.tilde_flag:
            extra = g0.transpose().inverse(self.S.F.default_prec + 4)
        else:
            extra = g0
        return self._copy(self.tilde_flag, extra if r is None else extra * r)

    def argument(self, g: LocalMatrix) -> LocalMatrix:
        if self.tilde_flag:
            g = w_matrix(self.S, self.n) * g.transpose().inverse(self.S.F.default_prec + 4)
        if self.right is not None:
            g = g * self.right
        return g

    def data(self, g: LocalMatrix) -> WData | None:
        return decompose(self.elements, self.argument(g))

    def exponent_from(self, d: WData, zeta_exp: int | None = None, char=None) -> int:
        """Value exponent of W for the raw data d, with optional overrides for zeta and the residue character."""
        S = self.S
        sign = -1 if self.conj else 1
        if self.family == "middle":
            p: MiddleParams = self.params
            z = p.zeta.exponent(S) if zeta_exp is None else zeta_exp
            chi = p.chi if char is None else char
            ch = chi.on_fq2(S, self.elements.E, d.residue)
        else:
            p2: SimpleParams = self.params
            z = p2.zeta_prime.exponent(S) if zeta_exp is None else zeta_exp
            phi = p2.phi if char is None else char
            ch = phi.on_fq(S, d.residue)
        return (sign * (d.psi_u + d.psi_beta) + d.k * z + ch) % S.m

    def exponent(self, g: LocalMatrix) -> int | None:
        d = self.data(g)
        return None if d is None else self.exponent_from(d)

    def __call__(self, g: LocalMatrix):
        e = self.exponent(g)
        return self.S.rational(0) if e is None else self.S.scalar(e)


# ---------------------------------------------------------------------------
# the two shapes entering the dual integrals


def alpha_gl1(S: Session, N: int, h: FieldElem, x: list[FieldElem]) -> LocalMatrix:
    """Rows e_2..e_2N on top; bottom row (h^-1, 0, -x_{2N-2} h^-1, ..., -x_1 h^-1).

    x is the list [x_1, ..., x_{2N-2}].
    """
    n = 2 * N
    zero = S.F.zero()
    hinv = h.inverse(S.F.default_prec)
    rows = [[zero] * n for _ in range(n)]
    one = S.F.one()
    for i in range(n - 1):
        rows[i][i + 1] = one
    rows[n - 1][0] = hinv
    for j in range(2, n):
        rows[n - 1][j] = -(x[n - j - 1] * hinv)
    return LocalMatrix(rows)


def x_window_gl1(N: int, i: int) -> int:
    """Lower valuation bound of x_i on the support: 0 for N <= i <= 2N-2, else -1."""
    return 0 if N <= i <= 2 * N - 2 else -1


@dataclass
class AlphaFactorization:
    u: LocalMatrix
    k: int
    z: LocalMatrix  # element of U^1 with alpha = u beta^k (unit) z


def support_alpha_gl1(S: Session, M: MiddleElements, h: FieldElem, x: list[FieldElem]) -> AlphaFactorization:
    """Closed-form support test for the GL(1) shape; raises NotInSupport."""
    N = M.N
    n = 2 * N
    hinv = h.inverse(S.F.default_prec)
    scaled = hinv * M.c * S.F.uniformizer(-2)
    if not (scaled - 1).val_at_least(1):
        raise NotInSupport("h^-1 not in c^-1 t^2 (1+P)")
    for i in range(1, n - 1):
        if not x[i - 1].val_at_least(x_window_gl1(N, i)):
            raise NotInSupport(f"x_{i} outside its window")
    u = LocalMatrix.identity(S.k, n).with_entry(N - 1, n - 1, M.d * S.F.uniformizer(-1))
    alpha = alpha_gl1(S, N, h, x)
    ct = M.c * S.F.uniformizer(-2)
    z = LocalMatrix.identity(S.k, n)
    for j in range(n):
        if j != 1:
            z = z.with_entry(0, j, alpha.rows[n - 1][j] * ct)
    return AlphaFactorization(u, -1, z)


def alpha_glN(S: Session, N: int, h: LocalMatrix, x: LocalMatrix | list, u: FieldElem) -> LocalMatrix:
    """[[0, 1, 0], [0, 0, I_{N-1}], [h, 0, x]] * g_u with x of size N x (N-1)."""
    n = 2 * N
    zero, one = S.F.zero(), S.F.one()
    rows = [[zero] * n for _ in range(n)]
    for i in range(N):
        rows[i][N + i] = one
    xr = x.rows if isinstance(x, LocalMatrix) else x
    for i in range(N):
        for j in range(N):
            rows[N + i][j] = h.rows[i][j]
        for j in range(N - 1):
            rows[N + i][N + 1 + j] = xr[i][j]
    return LocalMatrix(rows) * g_u_matrix(S, N, u)


def support_alpha_glN(S: Session, M: MiddleElements, h: LocalMatrix, x, u: FieldElem) -> AlphaFactorization:
    """Support test for the GL(N)-twist shape; only k = -N can occur."""
    N = M.N
    alpha = alpha_glN(S, N, h, x, u)
    if alpha.det().valuation() != 2 * N:
        raise NotInSupport("det valuation forces k != -N")
    d = decompose(M, alpha)
    if d is None:
        raise NotInSupport("no decomposition with k = -N")
    X = reduce_to_lattice(alpha, M.spec.power(N))
    z = M.beta_power(N) * X
    unit = _residue_unit(M, z)
    if unit is None:
        # the unipotent correction was needed; recover it from the data
        for nn in _correction_family(M):
            zz = M.beta_power(N) * nn.inverse() * M.beta_power(-N) * z
            if _residue_unit(M, zz) is not None:
                X = M.beta_power(-N) * zz
                break
    u0 = alpha * X.inverse(S.F.default_prec + 4)
    return AlphaFactorization(u0, -N, M.beta_power(N) * X)


# ---------------------------------------------------------------------------


def _j_reps(E, depth: int):
    """Coset representatives of J/U^depth, J = (unit part) U^1."""
    from .types_supercuspidal import filtration_reps

    S = E.S
    if isinstance(E, MiddleElements):
        units = [E.embed_residue(a) for a in range(1, S.q * S.q)]
    else:
        units = [LocalMatrix.identity(S.k, E.n).scale(S.F.const(a)) for a in range(1, S.q)]
    ones = list(filtration_reps(S, E.spec, 1, depth))
    for a in units:
        for y in ones:
            yield a * y


def oracle_cost(E, depth: int, window: tuple[int, int]) -> int:
    S = E.S
    units = S.q * S.q - 1 if isinstance(E, MiddleElements) else S.q - 1
    per = units * S.q ** ((depth - 1) * E.spec.dim_quotient())
    return per * (window[1] - window[0] + 1)


def membership_oracle(E, g: LocalMatrix, window: tuple[int, int] | None = None, depth: int = 2,
                      max_cost: int = 200_000) -> set:
    """Brute-force witnesses (k, j) with g in N beta^k j U^depth.

    j is reported by its position in the enumeration of J/U^depth.  Values of
    k whose determinant valuation cannot match are skipped without tests.
    """
    N = E.N
    if window is None:
        window = (-2 * N - 2, 2 * N + 2)
    cost = oracle_cost(E, depth, window)
    if cost > max_cost:
        raise CostGuardExceeded(f"oracle would run {cost} matrix tests (limit {max_cost})")
    S = E.S
    dv = g.det().valuation()
    out = set()
    spec_d = E.spec.power(depth)
    for k in range(window[0], window[1] + 1):
        if k * E.det_val_beta != dv:
            continue
        bmk = E.beta_power(-k)
        for idx, j in enumerate(_j_reps(E, depth)):
            y = g * j.inverse(S.F.default_prec + 4) * bmk
            if reduce_to_lattice(y, spec_d, shift_identity=True) is not None:
                out.add((k, idx))
    return out
