"""Local-converse harness: fingerprints, parameter recovery and the separation reports."""
from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .characters import (
    FiniteMultChar,
    QuasiCharacter,
    Session,
    build_xi_middle,
    tame_character,
)
from .localfield import DomainError, FieldElem, irreducible_quadratics
from .orders import MiddleElements, SimpleElements
from .rankin import GammaEngine, IntegrationConfig, jiang_target, jiang_window
from .scalars import GammaMonomial, NotMonomial, Scalar
from .types_supercuspidal import (
    MiddleParams,
    RootParam,
    SimpleParams,
    central_character_middle,
    central_character_simple,
    stratum_min_poly,
)

SCHEMA_VERSION = 1


class IntegrityError(RuntimeError):
    """The fingerprint entries do not determine the parameters consistently."""


# ---------------------------------------------------------------------------
# twists and fingerprints


@dataclass(frozen=True)
class Twist:
    kind: str  # "xi", "tame" or "simple"
    key: tuple

    def label(self) -> str:
        if self.kind == "xi":
            return f"xi:{self.key[0]}"
        if self.kind == "tame":
            return f"tame:nu={self.key[0]},lam={self.key[1]}:{self.key[2]}"
        u, e, z = self.key
        return f"simple:u={u},phi={e},zetap={z}"

    @classmethod
    def parse(cls, text: str) -> "Twist":
        """Inverse of label(); raises ValueError on malformed text."""
        kind, _, rest = text.partition(":")
        if kind == "xi" and rest:
            return cls("xi", (rest,))
        if kind in ("tame", "simple"):
            fields = dict(part.split("=", 1) for part in rest.split(","))
            if kind == "tame":
                order, j = fields["lam"].split(":")
                return cls("tame", (int(fields["nu"]), int(order), int(j)))
            z = RootParam.parse(fields["zetap"])
            return cls("simple", (int(fields["u"]), int(fields["phi"]), z.to_text()))
        raise ValueError(f"unknown twist {text!r}")


@dataclass(frozen=True)
class Scope:
    q: int
    N: int = 2
    m_zeta: int = 8
    m_lambda: int = 4
    m_zeta_prime: int = 8
    include_xi: bool = True
    include_tame: bool = True
    include_simple: bool = True


def tame_twists(S: Session, scope: Scope) -> list[Twist]:
    return [Twist("tame", (e, scope.m_lambda, j)) for e in range(S.q - 1) for j in range(scope.m_lambda)]


def simple_twists(S: Session, scope: Scope) -> list[Twist]:
    return [Twist("simple", (u, e, f"{scope.m_zeta_prime}:{j}"))
            for u in range(1, S.q) for e in range(S.q - 1) for j in range(scope.m_zeta_prime)]


def xi_twists(S: Session) -> list[Twist]:
    return [Twist("xi", (chi.label,)) for chi in build_xi_middle(S)]


def twist_family(S: Session, scope: Scope) -> list[Twist]:
    out = []
    if scope.include_xi:
        out += xi_twists(S)
    if scope.include_tame:
        out += tame_twists(S, scope)
    if scope.include_simple:
        out += simple_twists(S, scope)
    return out


def twist_object(S: Session, t: Twist):
    if t.kind == "xi":
        return {chi.label: chi for chi in build_xi_middle(S)}[t.key[0]]
    if t.kind == "tame":
        e, order, j = t.key
        return tame_character(S, e, S.root_exp(order, j))
    u, e, z = t.key
    return SimpleParams(S.F.const(u), FiniteMultChar(S.q - 1, e), RootParam.parse(z))


@dataclass
class Fingerprint:
    owner: MiddleParams
    entries: list[tuple[Twist, GammaMonomial]]
    checks: list[dict] = field(default_factory=list)

    def key(self) -> tuple:
        return tuple((t, m.coefficient, m.degree) for t, m in self.entries)

    def restricted(self, kinds: set[str]) -> tuple:
        return tuple((t, m.coefficient, m.degree) for t, m in self.entries if t.kind in kinds)

    def entry(self, t: Twist) -> GammaMonomial:
        for s, m in self.entries:
            if s == t:
                return m
        raise KeyError(t.label())

    def to_json(self) -> dict:
        return {"params": self.owner.to_json(),
                "entries": [{"twist": t.label(), **m.to_json()} for t, m in self.entries]}


def _monomial(res) -> GammaMonomial:
    if res.monomial is None or isinstance(res.monomial, NotMonomial):
        raise IntegrityError(f"gamma is not a monomial: {res.gamma.to_json()}")
    return res.monomial


def fingerprint(engine: GammaEngine, p: MiddleParams, twists: list[Twist],
                xi_engines: dict | None = None) -> Fingerprint:
    """Gamma monomials of p against every twist, in the given order.

    Xi entries go through translates (Psi vanishes otherwise) and are compared
    with the stability formula whenever it applies.
    """
    S = engine.S
    entries, checks = [], []
    for t in twists:
        obj = twist_object(S, t)
        if t.kind == "xi":
            eng = _xi_engine(engine, obj, xi_engines)
            res = eng.via_translates(p, obj)
            chk = {"params": p.to_json(), "twist": t.label(),
                   "cross_checked": res.notes.get("cross_checked", False),
                   "cross_check_failed": res.notes.get("cross_check_failed", False)}
            if obj.c_def is not None:
                chk["jiang"] = res.gamma == jiang_target(S, engine.N, p, obj)
            checks.append(chk)
        else:
            res = engine.gamma(p, obj)
        entries.append((t, _monomial(res)))
    return Fingerprint(p, entries, checks)


def _xi_engine(engine: GammaEngine, chi: QuasiCharacter, cache: dict | None) -> GammaEngine:
    cfg = jiang_window(engine.cfg, engine.N, chi)
    if cfg == engine.cfg:
        return engine
    if cache is None:
        return GammaEngine(engine.S, engine.N, cfg)
    if cfg not in cache:
        cache[cfg] = GammaEngine(engine.S, engine.N, cfg)
    return cache[cfg]


# ---------------------------------------------------------------------------
# recovery


def _root_exponent(S: Session, x: Scalar) -> int:
    e = x.root_exponent()
    if e is None:
        raise IntegrityError(f"expected a root of unity, got {x.to_text()}")
    return e


def _invert_on_fq(S: Session, values: dict[int, int]) -> int:
    """The unique a in k^x with nu_e(a) = zeta_m^values[e] for every e."""
    k = S.k
    hits = [a for a in k.units()
            if all(FiniteMultChar(S.q - 1, e).on_fq(S, a) == v % S.m for e, v in values.items())]
    if len(hits) != 1:
        raise IntegrityError(f"character values determine {len(hits)} elements of k^x")
    return hits[0]


def _zeta_param(S: Session, exp: int, orders: tuple[int, ...]) -> RootParam:
    for order in orders:
        for j in range(order):
            if S.root_exp(order, j) == exp % S.m:
                return RootParam(order, j)
    raise IntegrityError("zeta is not a root of unity of the enumerated orders")


def recover_zeta_and_cbar(fp: Fingerprint, S: Session, m_zeta: int = 8) -> tuple[RootParam, int]:
    """zeta from the standard gamma factor, c-bar from the tame twists.

    The tame entries read zeta^-1 * nu(-c^-1) * lambda(t)^2 * q * X^2.
    """
    tame = [(t, m) for t, m in fp.entries if t.kind == "tame"]
    trivial = [m for t, m in tame if t.key[0] == 0 and t.key[2] == 0]
    if not trivial:
        raise IntegrityError("fingerprint lacks the standard gamma factor")
    q = S.rational(Fraction(S.q))
    zeta_exp = (-_root_exponent(S, trivial[0].coefficient / q)) % S.m
    zeta = _zeta_param(S, zeta_exp, (m_zeta,))
    values: dict[int, int] = {}
    for t, m in tame:
        e, order, j = t.key
        lam2 = 2 * S.root_exp(order, j)
        v = (_root_exponent(S, m.coefficient / q) + zeta_exp - lam2) % S.m
        if values.setdefault(e, v) != v:
            raise IntegrityError("tame entries disagree on nu(-c^-1)")
    a = _invert_on_fq(S, values)  # a = -c^-1
    c_bar = S.k.neg(S.k.inv(a))
    return zeta, c_bar


def simple_prefactor_exponent(S: Session, N: int, p: MiddleParams, sp: SimpleParams) -> int:
    """Exponent of zeta^-N chi(acu + a sigma) omega(a u t^2) with a = u/(cu^2+du-1)."""
    k = S.k
    M = MiddleElements(S, N, p.c, p.d)
    Se = SimpleElements(S, N, sp.u)
    c, d = p.fbar
    u = sp.u.residue()
    den = k.sub(k.add(k.mul(c, k.mul(u, u)), k.mul(d, u)), 1)
    if den == 0:
        raise DomainError("cu^2 + du - 1 vanishes")
    a = k.mul(u, k.inv(den))
    res = M.E.make(k.mul(a, k.mul(c, u)), a)
    om = central_character_simple(S, Se, sp)
    au = FieldElem.make(k, 2, [k.mul(a, u)], None)
    return (-N * p.zeta.exponent(S) + p.chi.on_fq2(S, M.E, res) + om.exponent(S, au)) % S.m


def _a_value(S: Session, c: int, d: int, u: int) -> int | None:
    k = S.k
    den = k.sub(k.add(k.mul(c, k.mul(u, u)), k.mul(d, u)), 1)
    return None if den == 0 else k.mul(u, k.inv(den))


def recover_dbar_and_chi(fp: Fingerprint, S: Session, engine: GammaEngine, zeta: RootParam, c_bar: int,
                         ) -> tuple[int, FiniteMultChar]:
    """d-bar from the phi-dependence of the simple entries, then chi by exhaustion.

    For fixed u and zeta', the entries for phi and the trivial phi differ by
    phi(a) (times phi(-1) and known values of phi at u); inverting over the characters of
    k^x gives a mod P, hence d-bar.  The residual values chi(acu + a sigma)
    are matched against every character of k_{q^2}^x, using reference values
    of the remaining monomial from the engine.
    """
    k = S.k
    N = engine.N
    simple = [(t, m) for t, m in fp.entries if t.kind == "simple"]
    if not simple:
        raise IntegrityError("fingerprint lacks simple twists")
    by_u: dict[tuple, dict[int, GammaMonomial]] = {}
    for t, m in simple:
        u, e, z = t.key
        by_u.setdefault((u, z), {})[e] = m
    candidates = [d for (c, d) in irreducible_quadratics(k) if c == c_bar]
    a_seen: dict[int, int] = {}
    for (u, z), row in by_u.items():
        if 0 not in row or len(row) < 2:
            continue
        values = {}
        for e, m in row.items():
            # ratio = phi(-1) * phi(a) * phi(u)^-1, the sign coming from the functional equation
            r = _root_exponent(S, m.coefficient / row[0].coefficient)
            phi = FiniteMultChar(S.q - 1, e)
            values[e] = (r + phi.on_fq(S, u) - phi.on_fq(S, k.neg(1))) % S.m
        a = _invert_on_fq(S, values)
        if a_seen.setdefault(u, a) != a:
            raise IntegrityError("simple entries disagree on a")
    if a_seen:
        candidates = [d for d in candidates if all(_a_value(S, c_bar, d, u) == a for u, a in a_seen.items())]
    if len(candidates) != 1:
        raise IntegrityError(f"{len(candidates)} values of d-bar fit the simple entries")
    d_bar = candidates[0]
    # chi by exhaustion against reference monomials
    ref_chi = FiniteMultChar(S.q * S.q - 1, 0)
    ref_zeta = RootParam(1, 0)
    base = MiddleParams(S.F.const(c_bar), S.F.const(d_bar), ref_chi, ref_zeta)
    refs: dict[str, GammaMonomial] = {}
    fits = []
    for e in range(S.q * S.q - 1):
        chi = FiniteMultChar(S.q * S.q - 1, e)
        trial = MiddleParams(base.c, base.d, chi, zeta)
        ok = True
        for t, m in simple:
            sp = twist_object(S, t)
            lab = t.label()
            if lab not in refs:
                refs[lab] = _monomial(engine.glN(base, sp))
            ref = refs[lab]
            pre_ref = simple_prefactor_exponent(S, N, base, sp)
            pre = simple_prefactor_exponent(S, N, trial, sp)
            want = ref.coefficient * S.scalar((pre - pre_ref) % S.m)
            if m.degree != ref.degree or not m.coefficient == want:
                ok = False
                break
        if ok:
            fits.append(chi)
    if len(fits) != 1:
        raise IntegrityError(f"{len(fits)} characters chi fit the simple entries")
    return d_bar, fits[0]


def recover(fp: Fingerprint, S: Session, engine: GammaEngine, m_zeta: int = 8) -> MiddleParams:
    zeta, c_bar = recover_zeta_and_cbar(fp, S, m_zeta)
    d_bar, chi = recover_dbar_and_chi(fp, S, engine, zeta, c_bar)
    return MiddleParams(S.F.const(c_bar), S.F.const(d_bar), chi, zeta)


# ---------------------------------------------------------------------------
# separation reports


def central_char_separation(engine: GammaEngine, pa: MiddleParams, pb: MiddleParams) -> dict:
    """Equal Xi entries must force equal central characters."""
    S = engine.S
    tw = xi_twists(S)
    cache: dict = {}
    fa = fingerprint(engine, pa, tw, cache)
    fb = fingerprint(engine, pb, tw, cache)
    same_gamma = fa.key() == fb.key()
    oa = central_character_middle(S, MiddleElements(S, engine.N, pa.c, pa.d), pa)
    ob = central_character_middle(S, MiddleElements(S, engine.N, pb.c, pb.d), pb)
    same_omega = oa == ob
    differing = [t.label() for (t, m), (_, n) in zip(fa.entries, fb.entries)
                 if not (m.coefficient == n.coefficient and m.degree == n.degree)]
    return {"same_xi_gamma": same_gamma, "same_central_character": same_omega,
            "implication_holds": (not same_gamma) or same_omega, "differing_twists": differing,
            "checks": fa.checks + fb.checks}


def conductor_separation_report(engine: GammaEngine, params: list[MiddleParams]) -> dict:
    S, N = engine.S, engine.N
    scope = Scope(S.q, N)
    target = 2 * N * N + 2 * N  # 2N^2(1 + 1/N)
    rows, ok = [], True
    for p in params:
        for t in simple_twists(S, scope):
            res = engine.glN(p, twist_object(S, t))
            good = res.f_abs == target and res.f_psi == 2 * N
            ok &= good
            rows.append({"params": p.to_json(), "twist": t.label(), "f_psi": res.f_psi, "f_abs": res.f_abs,
                         "ok": good})
        for t in tame_twists(S, scope):
            res = engine.gl1(p, twist_object(S, t))
            good = res.f_abs == 2 * N + 2
            ok &= good
            rows.append({"params": p.to_json(), "twist": t.label(), "f_psi": res.f_psi, "f_abs": res.f_abs,
                         "ok": good})
    polys = {}
    for p in params:
        mp, mult = stratum_min_poly(S, MiddleElements(S, N, p.c, p.d))
        polys[f"middle{p.fbar}"] = {"poly": list(mp), "degree": len(mp) - 1, "multiplicity": mult}
    for u in range(1, S.q):
        mp, mult = stratum_min_poly(S, SimpleElements(S, N, S.F.const(u)))
        polys[f"simple(u={u})"] = {"poly": list(mp), "degree": len(mp) - 1, "multiplicity": mult}
    distinct = all(v["degree"] == 2 for key, v in polys.items() if key.startswith("middle")) and all(
        v["degree"] == 1 for key, v in polys.items() if key.startswith("simple"))
    return {"ok": ok and distinct, "target_f_abs": target, "rows": rows, "min_polys": polys,
            "completely_distinct": distinct,
            "imported_bound": {"statement": "f(rho x pi_simple^vee) < 2N^2(1+1/N) for rho not of middle type",
                               "value": target, "verified": False}}


# ---------------------------------------------------------------------------
# the end-to-end experiment


def enumerate_params(S: Session, scope: Scope) -> list[MiddleParams]:
    out = []
    for c, d in irreducible_quadratics(S.k):
        for e in range(S.q * S.q - 1):
            for j in range(scope.m_zeta):
                out.append(MiddleParams(S.F.const(c), S.F.const(d), FiniteMultChar(S.q * S.q - 1, e),
                                        RootParam(scope.m_zeta, j)))
    return out


def _fingerprints_for_fbar(args) -> list[dict]:
    q, N, cfg, scope, fbar = args
    S = Session(q, cfg.precision)
    engine = GammaEngine(S, N, cfg)
    twists = twist_family(S, scope)
    cache: dict = {}
    out = []
    for p in enumerate_params(S, scope):
        if p.fbar != fbar:
            continue
        fp = fingerprint(engine, p, twists, cache)
        try:
            back = recover(fp, S, engine, scope.m_zeta)
            round_trip = back.key() == p.key()
            err = None
        except IntegrityError as exc:
            round_trip, err = False, str(exc)
        out.append({"fp": fp, "round_trip": round_trip, "recovery_error": err})
    return out


def theorem_main_experiment(q: int, N: int = 2, cfg: IntegrationConfig = IntegrationConfig(),
                            scope: Scope | None = None, jobs: int = 1) -> dict:
    scope = scope or Scope(q, N)
    S = Session(q, cfg.precision)
    fbars = irreducible_quadratics(S.k)
    tasks = [(q, N, cfg, scope, fb) for fb in fbars]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_fingerprints_for_fbar, tasks))
    else:
        parts = [_fingerprints_for_fbar(t) for t in tasks]
    rows = [r for part in parts for r in part]
    rows.sort(key=lambda r: r["fp"].owner.key())
    fps = [r["fp"] for r in rows]
    collisions = _collisions(fps, lambda f: f.key())
    ablation = _collisions(fps, lambda f: f.restricted({"xi", "tame"}))
    jiang = [c for f in fps for c in f.checks]
    return {
        "schema_version": SCHEMA_VERSION,
        "session": {"q": q, "N": N, "precision": cfg.precision, "M_zeta": scope.m_zeta},
        "count": len(fps),
        "fingerprints": [f.to_json() for f in fps],
        "injectivity": not collisions,
        "collisions": collisions,
        "round_trip": all(r["round_trip"] for r in rows),
        "recovery_failures": [{"params": r["fp"].owner.to_json(), "error": r["recovery_error"]}
                              for r in rows if not r["round_trip"]],
        "ablation_without_simple": {"collisions": len(ablation)},
        "jiang_checks": jiang,
        "jiang_ok": all(c.get("jiang", True) and not c["cross_check_failed"] for c in jiang),
    }


def _collisions(fps: list[Fingerprint], key) -> list[list[dict]]:
    seen: dict = {}
    for f in fps:
        seen.setdefault(key(f), []).append(f)
    return [[g.owner.to_json() for g in group] for group in seen.values() if len(group) > 1]


def report_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["c", "d", "chi", "zeta", "twist", "coefficient", "degree"])
    for f in report["fingerprints"]:
        p = f["params"]
        for e in f["entries"]:
            w.writerow([p["c"], p["d"], f"{p['chi']['order']}:{p['chi']['e']}", p["zeta"], e["twist"],
                        e["coefficient"], e["degree"]])
    return buf.getvalue()
