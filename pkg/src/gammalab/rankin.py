"""Rankin-Selberg integrals as exact finite sums, and the resulting gamma factors.

Every integral is first reduced to a list of terms: the raw Whittaker data
at a cell representative, the X-degree, a power of sqrt(q) and a rational
measure weight.  Evaluating the terms for given parameters is cheap, so
families sharing f-bar reuse one term list.

Conventions (X = q^-s):
  GL(1) twist:  Psi  = sum_h W(diag(h,1..1)) chi(h) |h|^(s-(n-1)/2) d*h
                Psi~ = sum_h sum_x W(alpha(h,x)) chi(h)^-1 |h|^((3-n)/2-s) dx d*h
  GL(N) twist:  Psi  = sum_h W1(diag(h,I) g_u) W2(h) |det h|^(s-N/2) dh
                Psi~ = sum_h sum_v W1(alpha(h, h v)) W2(h) |det h|^(s-N/2+N-1) dv dh
with gamma = omega_2(-1)^(n-1) Psi~/Psi.
"""
from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .characters import QuasiCharacter, Session, tate_gamma
from .localfield import DomainError, FieldElem, PrecisionError
from .orders import (
    LocalMatrix,
    MiddleElements,
    OrderSpec,
    SimpleElements,
    diag,
    g_u_matrix,
    matrix_from,
    volume_additive,
    volume_gl,
    volume_multiplicative,
)
from .scalars import GammaMonomial, LaurentPoly, RationalFnX, RootSum, as_monomial
from .types_supercuspidal import (
    MiddleParams,
    SimpleParams,
    central_character_middle,
    filtration_reps,
)
from .whittaker import WData, WhittakerFn, alpha_gl1, alpha_glN, decompose

log = logging.getLogger(__name__)


class ZeroDenominator(ArithmeticError):
    pass


class AllTranslatesVanish(RuntimeError):
    pass


@dataclass(frozen=True)
class IntegrationConfig:
    valuation_window: tuple[int, int] = (-6, 6)
    unit_depth: int = 1
    x_extra: int = 1
    precision: int = 8
    haar_scale: Fraction = Fraction(1)

    def widened(self) -> "IntegrationConfig":
        lo, hi = self.valuation_window
        return replace(self, valuation_window=(lo - 2, hi + 2), unit_depth=self.unit_depth + 1,
                       precision=self.precision + 4)

    def to_json(self) -> dict:
        return {"valuation_window": list(self.valuation_window), "unit_depth": self.unit_depth,
                "x_extra": self.x_extra, "precision": self.precision, "haar_scale": str(self.haar_scale)}


@dataclass
class Term:
    degree: int
    half_q: int
    weight: Fraction
    w1: WData
    aux: object  # h (FieldElem) for GL(1), WData of W2 for GL(N)


@dataclass
class TermList:
    S: Session
    terms: list[Term]
    cost: int  # Whittaker evaluations performed

    def evaluate(self, value) -> RationalFnX:
        """Sum of weight * q^(half_q/2) * zeta_m^value(term) * X^degree."""
        S = self.S
        acc: dict[tuple[int, int], RootSum] = {}
        for t in self.terms:
            e = value(t)
            if e is None:
                continue
            key = (t.degree, t.half_q % 2)
            w = t.weight * Fraction(S.q) ** (t.half_q // 2)
            acc.setdefault(key, RootSum(S.K)).add(e, w)
        coeffs: dict[int, object] = {}
        for (deg, odd), rs in acc.items():
            c = rs.to_scalar()
            if odd:
                c = c * S.sqrt_q
            coeffs[deg] = coeffs[deg] + c if deg in coeffs else c
        coeffs = {d: c for d, c in coeffs.items() if not c.is_zero()}
        return RationalFnX(LaurentPoly(S.K, coeffs))


def unit_reps(S: Session, depth: int):
    """Exact representatives of (O/P^depth)^x."""
    k = S.k
    for code in itertools.product(range(S.q), repeat=depth):
        if code[0]:
            yield FieldElem.make(k, 0, list(code), None)


def _rational(x) -> Fraction:
    r = x.as_rational()
    if r is None:
        raise ValueError("measure weight is not rational")
    return r


def _cells(S: Session, lows: list[int], highs: list[int]):
    """All vectors with coordinates t^lo*(c_0 + ... ) truncated below t^hi, coordinatewise."""
    k = S.k
    ranges = [itertools.product(range(S.q), repeat=hi - lo) for lo, hi in zip(lows, highs)]
    for combo in itertools.product(*[list(r) for r in ranges]):
        yield [FieldElem.make(k, lo, list(c), None) for lo, c in zip(lows, combo)]


# ---------------------------------------------------------------------------
# GL(1) twists


def _gl1_depth(cfg: IntegrationConfig, chi: QuasiCharacter | None) -> int:
    need = 1 if chi is None or chi.is_tame() else chi.conductor_level() + 1
    return max(cfg.unit_depth, need)


def psi_terms_gl1(W: WhittakerFn, cfg: IntegrationConfig, depth: int) -> TermList:
    S = W.S
    n = W.n
    one = S.F.one()
    weight = _rational(volume_multiplicative(S, depth)) * cfg.haar_scale
    terms, cost = [], 0
    for v in range(cfg.valuation_window[0], cfg.valuation_window[1] + 1):
        for e in unit_reps(S, depth):
            h = e.shift(v)
            cost += 1
            d = W.data(diag(S, [h] + [one] * (n - 1)))
            if d is not None:
                terms.append(Term(v, v * (n - 1), weight, d, h))
    return TermList(S, terms, cost)


def x_lattice_gl1(N: int) -> list[int]:
    """Valuation of the invariance lattice for x_1..x_{2N-2} (x_i sits in column 2N-i)."""
    spec = OrderSpec.A2N(N, 1)
    return [spec.bound(0, 2 * N - i) for i in range(1, 2 * N - 1)]


def _x_lows(W: WhittakerFn, v: int, highs: list[int], extra: int) -> list[int] | None:
    """Lower ends of the x-windows on the shell val h = v, or None when no k fits.

    The last row of alpha(h, x) g0 survives the reduction u^-1 g unchanged, so
    it must lie in the last row of the lattice for beta^k; this bounds every
    x-coordinate from below.
    """
    n = W.n
    E = W.elements
    g0 = W.right
    dv = -v
    if g0 is not None:
        dv += g0.det().valuation()
    if W.tilde_flag:
        span = 3 * abs(v) + 2 * n
        return [b - extra - span for b in highs]
    if dv % E.det_val_beta:
        return None
    k = dv // E.det_val_beta
    row = E.spec.power(-k).bounds[n - 1]
    if g0 is None:
        col = list(row)
    else:
        ginv = g0.inverse(W.S.F.default_prec + 4).rows
        col = []
        for c in range(n):
            vals = [row[b] + ginv[b][c].valuation() for b in range(n) if ginv[b][c].coeffs]
            col.append(min(vals))
    # x_i sits in column 2N - i, scaled by h^-1
    return [min(highs[i] - extra, col[n - 1 - i] + v - extra) for i in range(len(highs))]


def _known(k, lo: int, digits: tuple) -> FieldElem:
    return FieldElem.make(k, lo, list(digits), lo + len(digits))


def _refine_choice(xs: list[FieldElem], xdig: list[tuple], lows, highs, hdig: tuple, depth: int):
    """Split along the coordinate known to the fewest significant digits."""
    best = None
    for i, x in enumerate(xs):
        if lows[i] + len(xdig[i]) >= highs[i]:
            continue
        rel = len(xdig[i]) - (x.v - lows[i]) if x.coeffs else -1
        if best is None or rel < best[0]:
            best = (rel, i)
    if len(hdig) < depth and (best is None or len(hdig) < best[0]):
        return "h"
    return None if best is None else best[1]


def psi_tilde_terms_gl1(W: WhittakerFn, cfg: IntegrationConfig, depth: int) -> TermList:
    """Terms of Psi~ for the GL(1) twist, by adaptive subdivision.

    A cell fixes the leading digits of h and of every x-coordinate.  The
    evaluator runs on the truncated entries; when it succeeds the value is
    constant on the whole cell, otherwise the cell is split.  A term with h
    known to depth p only survives for characters trivial on 1 + P^p, and aux
    records (h, p) for that filter.
    """
    S = W.S
    k = S.k
    n = W.n
    N = n // 2
    highs = x_lattice_gl1(N)
    xvol = Fraction(1)
    for b in highs:
        xvol *= _rational(volume_additive(S, b) * S.q_power(-1))
    extra_half = len(highs)
    hweights = {p: _rational(volume_multiplicative(S, p)) * cfg.haar_scale for p in range(1, depth + 1)}
    terms, cost = [], 0
    for v in range(cfg.valuation_window[0], cfg.valuation_window[1] + 1):
        lows = _x_lows(W, v, highs, cfg.x_extra)
        cost += 1
        if lows is None:
            continue
        stack = [((a,), [()] * len(highs)) for a in range(1, S.q)]
        while stack:
            hdig, xdig = stack.pop()
            h = _known(k, v, hdig)
            xs = [_known(k, lo, dg) for lo, dg in zip(lows, xdig)]
            cost += 1
            try:
                d = W.data(alpha_gl1(S, N, h, xs))
            except PrecisionError:
                choice = _refine_choice(xs, xdig, lows, highs, hdig, depth)
                if choice is None:
                    # finest cell: evaluate at the exact representative
                    h = FieldElem.make(k, v, list(hdig), None)
                    xs = [FieldElem.make(k, lo, list(dg), None) for lo, dg in zip(lows, xdig)]
                    d = W.data(alpha_gl1(S, N, h, xs))
                elif choice == "h":
                    stack.extend((hdig + (a,), xdig) for a in range(S.q))
                    continue
                else:
                    for a in range(S.q):
                        nx = list(xdig)
                        nx[choice] = xdig[choice] + (a,)
                        stack.append((hdig, nx))
                    continue
            if d is None:
                continue
            mult = S.q ** sum(hi - lo - len(dg) for hi, lo, dg in zip(highs, lows, xdig))
            hc = FieldElem.make(k, v, list(hdig), None)
            terms.append(Term(-v, v * (n - 3) + extra_half, hweights[len(hdig)] * xvol * mult, d,
                              (hc, len(hdig))))
    return TermList(S, terms, cost)


def psi_integral_gl1(W: WhittakerFn, chi: QuasiCharacter, cfg: IntegrationConfig = IntegrationConfig(),
                     terms: TermList | None = None) -> RationalFnX:
    if terms is None:
        terms = psi_terms_gl1(W, cfg, _gl1_depth(cfg, chi))
    return terms.evaluate(lambda t: (W.exponent_from(t.w1) + chi.exponent(t.aux)) % W.S.m)


def psi_tilde_gl1(W: WhittakerFn, chi: QuasiCharacter, cfg: IntegrationConfig = IntegrationConfig(),
                  terms: TermList | None = None) -> RationalFnX:
    """Psi~(1-s; rho(w) W~, chi^-1)."""
    if terms is None:
        terms = psi_tilde_terms_gl1(W, cfg, _gl1_depth(cfg, chi))
    level = chi.conductor_level()

    def value(t: Term):
        h, p = t.aux
        if level >= p:
            return None  # chi is nontrivial on 1 + P^p: the cell sums to zero
        return (W.exponent_from(t.w1) - chi.exponent(h)) % W.S.m

    return terms.evaluate(value)


# ---------------------------------------------------------------------------
# GL(N) twists


def _glN_cells(Se: SimpleElements, cfg: IntegrationConfig):
    """(k, h) with h = beta_u^k * j, j over J/U^depth."""
    S = Se.S
    N = Se.N
    reps = list(filtration_reps(S, Se.spec, 1, cfg.unit_depth)) if cfg.unit_depth > 1 else [
        LocalMatrix.identity(S.k, N)]
    units = [S.F.const(a) for a in range(1, S.q)]
    for k in range(cfg.valuation_window[0], cfg.valuation_window[1] + 1):
        bk = Se.beta_power(k)
        for a in units:
            for y in reps:
                yield k, bk * y.scale(a)


def v_lattice_glN(N: int) -> list[list[int]]:
    """U^1 bounds at the block (rows 0..N-1, columns N+1..2N-1)."""
    spec = OrderSpec.A2N(N, 1)
    return [[spec.bound(i, N + 1 + j) for j in range(N - 1)] for i in range(N)]


def psi_terms_glN(W1: WhittakerFn, W2: WhittakerFn, cfg: IntegrationConfig) -> TermList:
    """W1 is the g_u-translate of the middle function; W2 the simple psi^-1-model function."""
    S = W1.S
    N = W2.N
    weight = _rational(volume_gl(S, W2.elements.spec, cfg.unit_depth, cfg.haar_scale))
    one = S.F.one()
    terms, cost = [], 0
    for k, h in _glN_cells(W2.elements, cfg):
        cost += 1
        d2 = W2.data(h)
        if d2 is None:
            continue
        g = LocalMatrix([r + [S.F.zero()] * N for r in h.rows] +
                        [[S.F.zero()] * N + [one if i == j else S.F.zero() for j in range(N)] for i in range(N)])
        d1 = W1.data(g)
        if d1 is not None:
            terms.append(Term(-k, -k * N, weight, d1, d2))
    return TermList(S, terms, cost)


def psi_tilde_terms_glN(M: MiddleElements, W2: WhittakerFn, u: FieldElem, cfg: IntegrationConfig) -> TermList:
    S = M.S
    N = M.N
    lat = v_lattice_glN(N)
    flat_hi = [b for row in lat for b in row]
    flat_lo = [b - cfg.x_extra for b in flat_hi]
    vvol = Fraction(1)
    for b in flat_hi:
        vvol *= _rational(volume_additive(S, b) * S.q_power(-1))
    extra_half = len(flat_hi)
    weight = _rational(volume_gl(S, W2.elements.spec, cfg.unit_depth, cfg.haar_scale)) * vvol
    cells = list(_cells(S, flat_lo, flat_hi))
    terms, cost = [], 0
    for k, h in _glN_cells(W2.elements, cfg):
        # det alpha has valuation -k; the middle support needs it even
        if k % 2:
            continue
        cost += 1
        d2 = W2.data(h)
        if d2 is None:
            continue
        for vv in cells:
            v = [vv[i * (N - 1):(i + 1) * (N - 1)] for i in range(N)]
            hv = [[_dot([h.rows[i][l] for l in range(N)], [v[l][j] for l in range(N)]) for j in range(N - 1)]
                  for i in range(N)]
            cost += 1
            d1 = decompose(M, alpha_glN(S, N, h, hv, u))
            if d1 is not None:
                terms.append(Term(-k, k * (N - 2) + extra_half, weight, d1, d2))
    return TermList(S, terms, cost)


def _dot(a, b):
    acc = a[0] * b[0]
    for x, y in zip(a[1:], b[1:]):
        acc = acc + x * y
    return acc


def _glN_value(W1: WhittakerFn, W2: WhittakerFn):
    def value(t: Term):
        return (W1.exponent_from(t.w1) + W2.exponent_from(t.aux)) % W1.S.m
    return value


def psi_integral_glN(W1: WhittakerFn, W2: WhittakerFn, cfg: IntegrationConfig = IntegrationConfig(),
                     terms: TermList | None = None) -> RationalFnX:
    if terms is None:
        terms = psi_terms_glN(W1, W2, cfg)
    return terms.evaluate(_glN_value(W1, W2))


def psi_tilde_glN(W1: WhittakerFn, W2: WhittakerFn, u: FieldElem, cfg: IntegrationConfig = IntegrationConfig(),
                  terms: TermList | None = None) -> RationalFnX:
    if terms is None:
        terms = psi_tilde_terms_glN(W1.elements, W2, u, cfg)
    return terms.evaluate(_glN_value(W1, W2))


# ---------------------------------------------------------------------------


@dataclass
class GammaResult:
    gamma: RationalFnX
    monomial: GammaMonomial | None
    f_psi: int | None
    f_abs: int | None
    psi: RationalFnX | None = None
    psi_tilde: RationalFnX | None = None
    cost: int = 0
    seconds: float = 0.0
    notes: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        mono = None
        if self.monomial is not None:
            # degree is the exponent of X = q^-s; s_exponent is the coefficient of s in q^(a + b s)
            mono = {"coefficient": self.monomial.coefficient.to_text(),
                    "coefficient_polar": self.monomial.coefficient.pretty(), "degree": self.monomial.degree,
                    "s_exponent": -self.monomial.degree}
        return {"gamma": self.gamma.to_json(), "monomial": mono, "f_psi": self.f_psi, "f_abs": self.f_abs,
                "cost": self.cost, **self.notes}


def make_result(gamma: RationalFnX, n: int, m: int, **kw) -> GammaResult:
    mono = as_monomial(gamma) if not gamma.is_zero() else None
    if mono is not None and not isinstance(mono, GammaMonomial):
        mono = None
    f_psi = mono.degree if mono is not None else None
    f_abs = f_psi + n * m if f_psi is not None else None
    return GammaResult(gamma, mono, f_psi, f_abs, **kw)


def _ratio(S: Session, sign_exp: int, num: RationalFnX, den: RationalFnX) -> RationalFnX:
    if den.is_zero():
        raise ZeroDenominator("Psi vanishes for this Whittaker function")
    return RationalFnX.constant(S.scalar(sign_exp)) * num / den


def _session_for(S: Session, cfg: IntegrationConfig) -> Session:
    return S if S.F.default_prec == cfg.precision else S.with_precision(cfg.precision)


def _matrix_key(g: LocalMatrix | None):
    return None if g is None else tuple(x.to_text() for r in g.rows for x in r)


class GammaEngine:
    """Gamma factors with term lists cached per f-bar, translate and u.

    The Whittaker support data only depend on f-bar (and u for the simple
    side); chi, zeta, phi and zeta' only enter through the values, so one
    term list serves every parameter choice sharing the support data.
    """

    def __init__(self, S: Session, N: int, cfg: IntegrationConfig = IntegrationConfig()):
        self.S = _session_for(S, cfg)
        self.N = N
        self.cfg = cfg
        self._middle: dict = {}
        self._simple: dict = {}
        self._terms: dict = {}
        self.cost = 0

    def middle_fn(self, p: MiddleParams) -> WhittakerFn:
        key = p.fbar
        if key not in self._middle:
            self._middle[key] = WhittakerFn.middle(self.S, self.N, p)
        return self._middle[key].with_params(p)

    def simple_fn(self, sp: SimpleParams) -> WhittakerFn:
        key = sp.u.to_text()
        if key not in self._simple:
            self._simple[key] = WhittakerFn.simple(self.S, self.N, sp, conj=True)
        return self._simple[key].with_params(sp)

    def _cached(self, key, build):
        if key not in self._terms:
            t = build()
            self.cost += t.cost
            self._terms[key] = t
        return self._terms[key]

    def gl1(self, p: MiddleParams, chi: QuasiCharacter, translate: LocalMatrix | None = None) -> GammaResult:
        t0 = time.perf_counter()
        S, cfg = self.S, self.cfg
        W = self.middle_fn(p)
        if translate is not None:
            W = W.right_translate(translate)
        depth = _gl1_depth(cfg, chi)
        base = (p.fbar, _matrix_key(translate), depth)
        pt = self._cached(("psi1",) + base, lambda: psi_terms_gl1(W, cfg, depth))
        psi = psi_integral_gl1(W, chi, cfg, pt)
        if psi.is_zero():
            raise ZeroDenominator("Psi vanishes for this Whittaker function")
        tt = self._cached(("tilde1",) + base, lambda: psi_tilde_terms_gl1(W, cfg, depth))
        psit = psi_tilde_gl1(W, chi, cfg, tt)
        sign = chi.exponent(S.F.const(S.k.neg(1))) * (2 * self.N - 1)
        g = _ratio(S, sign, psit, psi)
        return make_result(g, 2 * self.N, 1, psi=psi, psi_tilde=psit, cost=pt.cost + tt.cost,
                           seconds=time.perf_counter() - t0)

    def glN(self, p: MiddleParams, sp: SimpleParams) -> GammaResult:
        t0 = time.perf_counter()
        S, cfg, N = self.S, self.cfg, self.N
        W1b = self.middle_fn(p)
        W1 = W1b.right_translate(g_u_matrix(S, N, sp.u))
        W2 = self.simple_fn(sp)
        base = (p.fbar, sp.u.to_text())
        pt = self._cached(("psiN",) + base, lambda: psi_terms_glN(W1, W2, cfg))
        psi = psi_integral_glN(W1, W2, cfg, pt)
        tt = self._cached(("tildeN",) + base, lambda: psi_tilde_terms_glN(W1b.elements, W2, sp.u, cfg))
        psit = psi_tilde_glN(W1b, W2, sp.u, cfg, tt)
        sign = sp.phi.on_fq(S, S.k.neg(1)) * (2 * N - 1)
        g = _ratio(S, sign, psit, psi)
        return make_result(g, 2 * N, N, psi=psi, psi_tilde=psit, cost=pt.cost + tt.cost,
                           seconds=time.perf_counter() - t0)

    def gamma(self, p: MiddleParams, pi2) -> GammaResult:
        if isinstance(pi2, QuasiCharacter):
            return self.gl1(p, pi2)
        return self.glN(p, pi2)

    def via_translates(self, p: MiddleParams, chi: QuasiCharacter,
                       translates: list[LocalMatrix] | None = None) -> GammaResult:
        """First two translates with Psi != 0 must give the same gamma."""
        if translates is None:
            translates = default_translates(self.S, self.N, chi)
        found: list[GammaResult] = []
        tried = 0
        for g0 in translates:
            tried += 1
            try:
                found.append(self.gl1(p, chi, translate=g0))
            except ZeroDenominator:
                continue
            if len(found) == 2:
                break
        if not found:
            raise AllTranslatesVanish(f"all {tried} translates give Psi = 0")
        res = found[0]
        res.notes["translates_tried"] = tried
        res.notes["cross_checked"] = len(found) == 2
        if len(found) == 2 and not (found[0].gamma == found[1].gamma):
            res.notes["cross_check_failed"] = True
        return res


def gamma_gl1(S: Session, N: int, p: MiddleParams, chi: QuasiCharacter,
              cfg: IntegrationConfig = IntegrationConfig(), translate: LocalMatrix | None = None) -> GammaResult:
    return GammaEngine(S, N, cfg).gl1(p, chi, translate)


def gamma_glN(S: Session, N: int, p: MiddleParams, sp: SimpleParams,
              cfg: IntegrationConfig = IntegrationConfig()) -> GammaResult:
    return GammaEngine(S, N, cfg).glN(p, sp)


def gamma(S: Session, N: int, p: MiddleParams, pi2, cfg: IntegrationConfig = IntegrationConfig()) -> GammaResult:
    return GammaEngine(S, N, cfg).gamma(p, pi2)


def default_translates(S: Session, N: int, chi: QuasiCharacter) -> list[LocalMatrix]:
    """Upper bumps I + y E_12 with val y = -L and y over units mod P^2, then diagonal elements.

    Lower-unipotent bumps and diagonal elements keep W(diag(h,1..1)) supported on
    1 + P with a constant value, so Psi vanishes for every wild chi; the upper
    bump produces the Gauss sum instead.
    """
    n = 2 * N
    L = chi.conductor_level()
    out = [matrix_from(S, {(0, 1): e.shift(-L)}, n, diag_one=True) for e in unit_reps(S, 2)]
    for v in (-1, 1):
        out.append(diag(S, [S.F.uniformizer(v)] + [S.F.one()] * (n - 1)))
    return out


def jiang_window(cfg: IntegrationConfig, N: int, chi: QuasiCharacter) -> IntegrationConfig:
    """Extend the valuation window to reach degree 2N(L+1), beyond the expected conductor."""
    lo, hi = cfg.valuation_window
    need = -2 * N * (chi.conductor_level() + 1) - 2
    return replace(cfg, valuation_window=(min(lo, need), hi))


def gamma_via_translates(S: Session, N: int, p: MiddleParams, chi: QuasiCharacter,
                         translates: list[LocalMatrix] | None = None,
                         cfg: IntegrationConfig = IntegrationConfig()) -> GammaResult:
    return GammaEngine(S, N, jiang_window(cfg, N, chi)).via_translates(p, chi, translates)


def jiang_target(S: Session, N: int, p: MiddleParams, chi: QuasiCharacter) -> RationalFnX:
    """omega(c_def)^-1 * gamma(s, chi)^(2N); only defined for ramified chi carrying c_def."""
    if chi.c_def is None:
        raise DomainError(f"{chi.label} has no defining element c; the stability formula does not apply")
    M = MiddleElements(S, N, p.c, p.d)
    om = central_character_middle(S, M, p)
    e = om.exponent(S, chi.c_def)
    return RationalFnX.constant(S.scalar(-e)) * tate_gamma(S, chi) ** (2 * N)


def verify_stabilized(compute, cfg: IntegrationConfig) -> dict:
    """compute(cfg) -> GammaResult or RationalFnX; rerun on the widened config and compare exactly."""
    t0 = time.perf_counter()
    a = compute(cfg)
    t1 = time.perf_counter()
    wide = cfg.widened()
    b = compute(wide)
    t2 = time.perf_counter()
    va = a.gamma if isinstance(a, GammaResult) else a
    vb = b.gamma if isinstance(b, GammaResult) else b
    stable = va == vb
    report = {"stable": stable, "base": cfg.to_json(), "widened": wide.to_json()}
    log.debug("stabilization runs took %.3f s and %.3f s", t1 - t0, t2 - t1)
    if not stable:
        for name, c in (("valuation_window", replace(cfg, valuation_window=wide.valuation_window)),
                        ("unit_depth", replace(cfg, unit_depth=wide.unit_depth)),
                        ("precision", replace(cfg, precision=wide.precision))):
            r = compute(c)
            vr = r.gamma if isinstance(r, GammaResult) else r
            if not vr == va:
                report["first_divergent"] = name
                break
    report["values"] = [va.to_json(), vb.to_json()]
    return report
