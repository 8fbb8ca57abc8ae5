"""Command-line front end: gamma values, verification suites and configuration.

    gammalab gamma --q 3 --N 2 --f 2,0 --chi 1 --zeta 8:1 --twist trivial
    gammalab verify props --q 3 --N 2
    gammalab verify theorem-main --q 2 --N 2 --out report.json

Exit codes: 0 success, 1 a verification assertion failed, 2 invalid input,
3 a cost guard refused the computation.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .characters import (
    FiniteMultChar,
    QuasiCharacter,
    Session,
    build_xi_middle,
    tame_family,
    trivial_character,
)
from .converse import (
    SCHEMA_VERSION,
    Scope,
    Twist,
    central_char_separation,
    conductor_separation_report,
    enumerate_params,
    fingerprint,
    report_csv,
    simple_prefactor_exponent,
    theorem_main_experiment,
    twist_family,
    twist_object,
)
from .localfield import DomainError, FieldElem, irreducible_quadratics, is_irreducible_quadratic
from .orders import (
    LocalMatrix,
    MiddleElements,
    OrderSpec,
    SimpleElements,
    volume_gl,
    volume_multiplicative,
)
from .rankin import (
    GammaEngine,
    IntegrationConfig,
    jiang_target,
    jiang_window,
    v_lattice_glN,
    verify_stabilized,
)
from .scalars import RationalFnX
from .types_supercuspidal import (
    MiddleParams,
    NotInGroup,
    RootParam,
    SimpleParams,
    bessel_average_middle,
    filtration_reps,
    lambda_middle_exponent,
)
from .whittaker import (
    CostGuardExceeded,
    NotInSupport,
    WhittakerFn,
    alpha_gl1,
    alpha_glN,
    decompose,
    membership_oracle,
    psi_n_exponent,
    support_alpha_gl1,
    support_alpha_glN,
)

log = logging.getLogger("gammalab")

SUITES = ("props", "lemmas", "jiang", "conductor", "theorem-main", "infra")
PASS, FAIL, NOT_APPLICABLE = "pass", "fail", "not-applicable"


class UsageError(ValueError):
    """Invalid command-line or configuration input (exit code 2)."""


# ---------------------------------------------------------------------------
# configuration


@dataclass
class SessionConfig:
    q: int = 2
    N: int = 2
    precision: int = 8
    m_zeta: int = 8
    cfg: IntegrationConfig = field(default_factory=IntegrationConfig)
    out: str | None = None
    fmt: str = "json"
    jobs: int = 1
    oracle: bool = False
    samples: int = 200
    seed: int = 0

    def validate(self) -> None:
        if self.N < 2:
            raise UsageError("N >= 2 required")
        try:
            irreducible_quadratics(Session(self.q, self.precision).k)
        except (DomainError, ValueError) as exc:
            raise UsageError(f"q = {self.q} is not a supported prime power: {exc}") from exc
        if self.fmt not in ("json", "csv"):
            raise UsageError(f"unknown output format {self.fmt!r}")
        if self.jobs < 1:
            raise UsageError("--jobs must be positive")

    def session(self) -> Session:
        return Session(self.q, self.precision, self.m_zeta)

    def describe(self) -> dict:
        return {"q": self.q, "N": self.N, "precision": self.precision, "M_zeta": self.m_zeta,
                "integration": self.cfg.to_json()}


CONFIG_KEYS = {
    "q": int, "N": int, "precision": int, "m_zeta": int, "jobs": int, "samples": int, "seed": int,
    "unit_depth": int, "x_extra": int, "out": str, "format": str,
    "window": lambda s: tuple(int(x) for x in s.split(",")),
    "haar_scale": Fraction,
    "oracle": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
}


def read_config_file(path: str) -> dict:
    """Flat key=value lines; blank lines and lines starting with # are ignored."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or key not in CONFIG_KEYS:
                raise UsageError(f"{path}:{lineno}: unknown or malformed entry {line!r}")
            try:
                out[key] = CONFIG_KEYS[key](value)
            except ValueError as exc:
                raise UsageError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return out


def build_config(args: argparse.Namespace, environ=os.environ) -> SessionConfig:
    """Defaults < GAMMALAB_PRECISION < config file < flags."""
    values: dict = {}
    if environ.get("GAMMALAB_PRECISION"):
        try:
            values["precision"] = int(environ["GAMMALAB_PRECISION"])
        except ValueError as exc:
            raise UsageError("GAMMALAB_PRECISION must be an integer") from exc
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None and flag is not False:
            values[key] = flag
    base = IntegrationConfig()
    cfg = IntegrationConfig(
        valuation_window=tuple(values.get("window", base.valuation_window)),
        unit_depth=values.get("unit_depth", base.unit_depth),
        x_extra=values.get("x_extra", base.x_extra),
        precision=values.get("precision", base.precision),
        haar_scale=Fraction(values.get("haar_scale", base.haar_scale)),
    )
    sc = SessionConfig(q=values.get("q", 2), N=values.get("N", 2), precision=cfg.precision,
                       m_zeta=values.get("m_zeta", 8), cfg=cfg, out=values.get("out"),
                       fmt=values.get("format", "json"), jobs=values.get("jobs", 1),
                       oracle=values.get("oracle", False), samples=values.get("samples", 200),
                       seed=values.get("seed", 0))
    if sc.out and sc.out.endswith(".csv") and "format" not in values:
        sc.fmt = "csv"
    sc.validate()
    return sc


# ---------------------------------------------------------------------------
# reports


def assertion(ident: str, status, detail=None) -> dict:
    if isinstance(status, bool):
        status = PASS if status else FAIL
    return {"id": ident, "status": status, "detail": detail}


def make_report(suite: str, sc: SessionConfig, assertions: list[dict], **extra) -> dict:
    return {"schema_version": SCHEMA_VERSION, "suite": suite, "session": sc.describe(),
            "ok": all(a["status"] != FAIL for a in assertions), "assertions": assertions, **extra}


def first_failure(report: dict) -> dict | None:
    return next((a for a in report["assertions"] if a["status"] == FAIL), None)


def _spread(items: list, count: int) -> list:
    if len(items) <= count:
        return list(items)
    step = len(items) / count
    return [items[int(i * step)] for i in range(count)]


def _pmap(fn, tasks: list, jobs: int) -> list:
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def _middle_params(S: Session, c: int, d: int, chi_e: int, zeta: RootParam) -> MiddleParams:
    return MiddleParams(S.F.const(c), S.F.const(d), FiniteMultChar(S.q * S.q - 1, chi_e), zeta)


def _one_per_fbar(S: Session, sc: SessionConfig) -> list[MiddleParams]:
    """One parameter per f-bar, with chi and zeta varying across f-bars."""
    out = []
    for i, (c, d) in enumerate(irreducible_quadratics(S.k)):
        out.append(_middle_params(S, c, d, (1 + i) % (S.q * S.q - 1), RootParam(sc.m_zeta, (3 + i) % sc.m_zeta)))
    return out


# ---------------------------------------------------------------------------
# suite: propositions for tame and simple twists


def tame_closed_form(S: Session, p: MiddleParams, lam: QuasiCharacter, sign: int = -1) -> tuple:
    """(coefficient, degree) of zeta^-1 lambda(sign c^-1 t^2) q X^2."""
    k = S.k
    c = p.c.residue()
    x = S.F.const(k.inv(c) if sign > 0 else k.neg(k.inv(c))).shift(2)
    coeff = S.scalar((-p.zeta.exponent(S) + lam.exponent(x)) % S.m) * S.rational(S.q)
    return coeff, 2


def simple_tuples(S: Session, sc: SessionConfig) -> list[tuple[int, int, int, int]]:
    """Four (chi, zeta, phi, zeta') exponent tuples varying every parameter."""
    a, b = S.q * S.q - 1, S.q - 1
    m = sc.m_zeta
    return [(1 % a, 3 % m, 0, 1 % m), (2 % a, 5 % m, (b - 1) % b, 0), (0, 0, 0, 5 % m),
            ((a - 2) % a, 7 % m, (b - 1) % b, 3 % m)]


def suite_props(sc: SessionConfig) -> dict:
    S, N = sc.session(), sc.N
    engine = GammaEngine(S, N, sc.cfg)
    params = enumerate_params(S, Scope(S.q, N, sc.m_zeta))
    lams = tame_family(S)
    out = []

    # Psi for tame twists is the volume of 1 + P
    vol = RationalFnX.constant(volume_multiplicative(S, 1) * S.rational(sc.cfg.haar_scale))
    bad, slowest, checked = [], 0.0, 0
    for p in _spread(params, 3):
        for lam in lams:
            t0 = time.perf_counter()
            r = engine.gl1(p, lam)
            slowest = max(slowest, time.perf_counter() - t0)
            checked += 1
            if not r.psi == vol:
                bad.append({"params": p.to_json(), "lambda": lam.label, "psi": r.psi.to_json()})
    out.append(assertion("tame-psi-volume", not bad, {"checked": checked, "mismatches": bad[:5],
                                                      "max_seconds": round(slowest, 3)}))

    # gamma for tame twists against the closed form, with both signs recorded
    bad, minus_ok, plus_ok, sign_sensitive, checked = [], 0, 0, 0, 0
    for p in params:
        for lam in lams:
            r = engine.gl1(p, lam)
            checked += 1
            m = r.monomial
            want = tame_closed_form(S, p, lam, -1)
            alt = tame_closed_form(S, p, lam, +1)
            got = (m.coefficient, m.degree) if m is not None else None
            if got == want:
                minus_ok += 1
            else:
                bad.append({"params": p.to_json(), "lambda": lam.label, "gamma": r.gamma.to_json()})
            if want != alt:
                sign_sensitive += 1
                plus_ok += got == alt
    out.append(assertion("tame-gamma-closed-form", not bad, {
        "checked": checked, "mismatches": bad[:5], "degree_X": 2, "s_exponent": -2,
        "sign": {"minus_matches": minus_ok, "sign_sensitive_cases": sign_sensitive,
                 "plus_matches_on_sign_sensitive": plus_ok}}))

    # Psi for the simple twist is vol(U^1(I_N))
    vol_u1 = RationalFnX.constant(volume_gl(S, OrderSpec.I_N(N), 1, sc.cfg.haar_scale))
    bad, timing = [], {}
    p0 = params[0]
    for u in range(1, S.q):
        sp = SimpleParams(S.F.const(u), FiniteMultChar(S.q - 1, 0), RootParam(sc.m_zeta, 0))
        t0 = time.perf_counter()
        r = engine.glN(p0, sp)
        timing[str(u)] = round(time.perf_counter() - t0, 3)
        if not r.psi == vol_u1:
            bad.append({"u": u, "psi": r.psi.to_json()})
    out.append(assertion("simple-psi-volume", not bad, {"mismatches": bad, "seconds": timing}))

    # gamma for simple twists: zeta^-N chi(acu + a sigma) omega(a u t^2) M
    lit_bad, signed_bad, deg_bad, rows = [], [], [], []
    target_abs = 2 * N * N + 2 * N
    for u in range(1, S.q):
        ms, signed = [], []
        for chi_e, z, phi_e, zp in simple_tuples(S, sc):
            c, d = p0.fbar
            p = _middle_params(S, c, d, chi_e, RootParam(sc.m_zeta, z))
            sp = SimpleParams(S.F.const(u), FiniteMultChar(S.q - 1, phi_e), RootParam(sc.m_zeta, zp))
            r = engine.glN(p, sp)
            if r.monomial is None:
                deg_bad.append({"u": u, "gamma": r.gamma.to_json()})
                continue
            if r.f_psi != 2 * N or r.f_abs != target_abs:
                deg_bad.append({"u": u, "f_psi": r.f_psi, "f_abs": r.f_abs})
            pref = simple_prefactor_exponent(S, N, p, sp)
            M = r.monomial.coefficient * S.scalar(-pref)
            sign = sp.phi.on_fq(S, S.k.neg(1))
            ms.append((M, r.monomial.degree))
            signed.append((M * S.scalar(sign), r.monomial.degree))
            rows.append({"u": u, "chi": chi_e, "zeta": z, "phi": phi_e, "zeta_prime": zp,
                         "M": M.to_text(), "degree_X": r.monomial.degree})
        if len(set(ms)) > 1:
            lit_bad.append(u)
        if len(set(signed)) > 1:
            signed_bad.append(u)
    out.append(assertion("simple-gamma-factorization", not lit_bad and not deg_bad,
                         {"u_with_varying_M": lit_bad, "rows": rows}))
    out.append(assertion("simple-gamma-factorization-signed", not signed_bad and not deg_bad,
                         {"statement": "M * phi(-1) independent of (chi, zeta, phi, zeta')",
                          "u_with_varying_M": signed_bad}))
    out.append(assertion("simple-gamma-conductor", not deg_bad,
                         {"degree_X": 2 * N, "s_exponent": -2 * N, "f_abs": target_abs, "failures": deg_bad}))
    return make_report("props", sc, out)


# ---------------------------------------------------------------------------
# suite: support lemmas against the brute-force oracle


def _lemma_sample(args) -> dict:
    q, N, precision, seed, index, depth, use_oracle = args
    S = Session(q, precision)
    k, F = S.k, S.F
    rng = random.Random(seed * 1_000_003 + index)
    fbars = irreducible_quadratics(k)
    c, d = fbars[rng.randrange(len(fbars))]
    M = MiddleElements(S, N, F.const(c), F.const(d))

    def rnd(v0: int, v1: int) -> FieldElem:
        return FieldElem.make(k, v0, [rng.randrange(q) for _ in range(v1 - v0)], None)

    if index % 2 == 0:
        shape, stratum = "gl1", -1
        if rng.random() < 0.5:
            h = M.c * F.uniformizer(-2) * (F.one() + rnd(1, 3))
        else:
            h = FieldElem.make(k, rng.choice([-3, -2, -1, 0]), [rng.randrange(1, q)] +
                               [rng.randrange(q) for _ in range(2)], None)
        x = [rnd(rng.choice([-2, -1, 0]), 2) for _ in range(2 * N - 2)]
        g = alpha_gl1(S, N, h, x)
        try:
            support_alpha_gl1(S, M, h, x)
            closed = True
        except NotInSupport:
            closed = False
    else:
        shape, stratum = "glN", -N
        u = F.const(rng.randrange(1, q))
        Se = SimpleElements(S, N, F.one())
        kk = rng.choice([-2 * N, -2 * N, -2 * N, -2 * N + 2, -2 * N - 2, 0])
        h = Se.beta_power(kk).scale(F.const(rng.randrange(1, q)) + rnd(1, 2))
        v = [[rnd(b - 1, b + 1) for b in row] for row in v_lattice_glN(N)]
        x = [[sum((h.rows[r][l] * v[l][j] for l in range(1, N)), h.rows[r][0] * v[0][j])
              for j in range(N - 1)] for r in range(N)]
        g = alpha_glN(S, N, h, x, u)
        try:
            support_alpha_glN(S, M, h, x, u)
            closed = True
        except NotInSupport:
            closed = False
    if use_oracle:
        strata = sorted({kk for kk, _ in membership_oracle(M, g, depth=depth)})
    else:
        dd = decompose(M, g)
        strata = [] if dd is None else [dd.k]
    return {"index": index, "shape": shape, "closed": closed, "reference": bool(strata), "strata": strata,
            "expected_stratum": stratum}


def suite_lemmas(sc: SessionConfig, depth: int = 2) -> dict:
    tasks = [(sc.q, sc.N, sc.precision, sc.seed, i, depth, sc.oracle) for i in range(sc.samples)]
    rows = _pmap(_lemma_sample, tasks, sc.jobs)
    out = []
    for shape in ("gl1", "glN"):
        mine = [r for r in rows if r["shape"] == shape]
        disagree = [r for r in mine if r["closed"] != r["reference"]]
        accepted = [r for r in mine if r["closed"]]
        wrong_stratum = [r for r in accepted if r["strata"] != [r["expected_stratum"]]]
        detail = {"samples": len(mine), "accepted": len(accepted), "rejected": len(mine) - len(accepted),
                  "reference": "oracle" if sc.oracle else "decompose", "depth": depth}
        out.append(assertion(f"support-{shape}-agreement", not disagree, {**detail, "disagreements": disagree[:5]}))
        out.append(assertion(f"support-{shape}-witness-stratum", not wrong_stratum,
                             {"expected_k": mine[0]["expected_stratum"] if mine else None,
                              "wrong": wrong_stratum[:5]}))
        out.append(assertion(f"support-{shape}-coverage", bool(accepted) and len(accepted) < len(mine), detail))
    return make_report("lemmas", sc, out)


# ---------------------------------------------------------------------------
# suite: stability formula for highly ramified twists


def _jiang_rows(args) -> list[dict]:
    sc, pj = args
    S = sc.session()
    p = MiddleParams.from_json(S, pj)
    engines: dict = {}
    rows = []
    for chi in build_xi_middle(S):
        cfg = jiang_window(sc.cfg, sc.N, chi)
        if cfg not in engines:
            engines[cfg] = GammaEngine(S, sc.N, cfg)
        res = engines[cfg].via_translates(p, chi)
        row = {"params": pj, "chi": chi.label, "level": chi.conductor_level(),
               "gamma": res.gamma.to_json(), "cross_checked": res.notes.get("cross_checked", False),
               "cross_check_failed": res.notes.get("cross_check_failed", False)}
        if chi.c_def is None:
            row["status"] = NOT_APPLICABLE
            row["reason"] = "no defining element; the stability formula does not apply"
        else:
            row["target"] = jiang_target(S, sc.N, p, chi).to_json()
            row["status"] = PASS if (res.gamma == jiang_target(S, sc.N, p, chi)
                                     and not row["cross_check_failed"]) else FAIL
        rows.append(row)
    return rows


def suite_jiang(sc: SessionConfig, params: list[MiddleParams] | None = None) -> dict:
    S = sc.session()
    params = params or _one_per_fbar(S, sc)
    parts = _pmap(_jiang_rows, [(sc, p.to_json()) for p in params], sc.jobs)
    rows = [r for part in parts for r in part]
    out = [assertion(f"jiang[{r['chi']}]@{r['params']['c']},{r['params']['d']}", r["status"], r) for r in rows]
    return make_report("jiang", sc, out)


# ---------------------------------------------------------------------------
# suite: conductor and central-character separation


def suite_conductor(sc: SessionConfig) -> dict:
    S = sc.session()
    engine = GammaEngine(S, sc.N, sc.cfg)
    params = _one_per_fbar(S, sc)
    rep = conductor_separation_report(engine, params)
    out = [
        assertion("conductor-twists", all(r["ok"] for r in rep["rows"]),
                  {"target_f_abs": rep["target_f_abs"], "failures": [r for r in rep["rows"] if not r["ok"]][:5]}),
        assertion("completely-distinct-strata", rep["completely_distinct"], rep["min_polys"]),
    ]
    p0 = params[0]
    c, d = p0.fbar
    others = [_middle_params(S, c, d, p0.chi.e, RootParam(sc.m_zeta, (p0.zeta.e + 1) % sc.m_zeta)),
              _middle_params(S, c, d, (p0.chi.e + 1) % (S.q * S.q - 1), p0.zeta)]
    seps = [central_char_separation(engine, p0, pb) for pb in others]
    out.append(assertion("central-character-separation", all(s["implication_holds"] for s in seps),
                         [{k: v for k, v in s.items() if k != "checks"} for s in seps]))
    return make_report("conductor", sc, out, imported_bound=rep["imported_bound"])


# ---------------------------------------------------------------------------
# suite: injectivity and recovery over the enumerated family


def expected_family_size(q: int, m_zeta: int) -> int:
    return len(irreducible_quadratics(Session(q).k)) * (q * q - 1) * m_zeta


def suite_theorem_main(sc: SessionConfig) -> dict:
    scope = Scope(sc.q, sc.N, sc.m_zeta)
    rep = theorem_main_experiment(sc.q, sc.N, sc.cfg, scope, sc.jobs)
    want = expected_family_size(sc.q, sc.m_zeta)
    jiang = rep["jiang_checks"]
    out = [
        assertion("family-size", rep["count"] == want, {"count": rep["count"], "expected": want}),
        assertion("fingerprint-injectivity", rep["injectivity"], {"collisions": rep["collisions"][:5]}),
        assertion("parameter-round-trip", rep["round_trip"], {"failures": rep["recovery_failures"][:5]}),
        assertion("xi-entries-consistent", rep["jiang_ok"],
                  {"checked": len(jiang), "stability_formula_checked": sum("jiang" in c for c in jiang)}),
    ]
    return make_report("theorem-main", sc, out, experiment=rep)


# ---------------------------------------------------------------------------
# suite: infrastructure properties


def _fingerprint_key(S: Session, N: int, cfg: IntegrationConfig, p: MiddleParams, twists: list[Twist]) -> tuple:
    return fingerprint(GammaEngine(S, N, cfg), p, twists, {}).key()


def suite_infra(sc: SessionConfig) -> dict:
    S, N, cfg = sc.session(), sc.N, sc.cfg
    params = enumerate_params(S, Scope(S.q, N, sc.m_zeta))
    p = params[len(params) // 3]
    lam = tame_family(S)[-1]
    sp = SimpleParams(S.F.const(S.q - 1), FiniteMultChar(S.q - 1, S.q - 2), RootParam(sc.m_zeta, 1))
    wild = [chi for chi in build_xi_middle(S) if chi.c_def is not None]
    chi2 = min(wild, key=lambda chi: chi.conductor_level())
    out = []

    # stabilization under window + 2, depth + 1, precision + 4
    stab = {
        "tame": verify_stabilized(lambda c: GammaEngine(S, N, c).gl1(p, lam), cfg),
        "simple": verify_stabilized(lambda c: GammaEngine(S, N, c).glN(p, sp), cfg),
        "tame-psi": verify_stabilized(lambda c: GammaEngine(S, N, c).gl1(p, lam).psi, cfg),
        "simple-psi": verify_stabilized(lambda c: GammaEngine(S, N, c).glN(p, sp).psi, cfg),
        "xi": verify_stabilized(lambda c: GammaEngine(S, N, jiang_window(c, N, chi2)).via_translates(p, chi2), cfg),
    }
    if S.q == 2:
        twists = twist_family(S, Scope(S.q, N, sc.m_zeta))
        a = _fingerprint_key(S, N, cfg, p, twists)
        b = _fingerprint_key(S, N, cfg.widened(), p, twists)
        stab["fingerprint"] = {"stable": a == b}
    out.append(assertion("stabilization", all(v["stable"] for v in stab.values()),
                         {k: {"stable": v["stable"], **({"first_divergent": v["first_divergent"]}
                                                        if "first_divergent" in v else {})}
                          for k, v in stab.items()}))

    # the Haar normalization cancels in gamma
    scaled = replace(cfg, haar_scale=Fraction(3))
    e0, e1 = GammaEngine(S, N, cfg), GammaEngine(S, N, scaled)
    same = e0.gl1(p, lam).gamma == e1.gl1(p, lam).gamma and e0.glN(p, sp).gamma == e1.glN(p, sp).gamma
    out.append(assertion("measure-invariance", same, {"haar_scale": "3"}))

    # other lifts of f-bar give the same Lambda on common elements and the same gamma
    c, d = p.c, p.d
    p2 = MiddleParams(c + S.F.uniformizer(1), d + S.F.uniformizer(2), p.chi, p.zeta)
    lift = _lift_check(S, N, p, p2, sc.seed)
    g_same = (GammaEngine(S, N, cfg).gl1(p, lam).gamma == GammaEngine(S, N, cfg).gl1(p2, lam).gamma
              and GammaEngine(S, N, cfg).glN(p, sp).gamma == GammaEngine(S, N, cfg).glN(p2, sp).gamma)
    out.append(assertion("lift-independence-lambda", lift["compared"] > 0 and not lift["mismatches"], lift))
    out.append(assertion("lift-independence-gamma", g_same, {"lift": p2.to_json()}))

    # Bessel identities through the averaging oracle
    out.append(_bessel_assertion(S, N, p, sc.seed))
    out.append(_transformation_assertion(S, N, p, sc.seed))
    return make_report("infra", sc, out)


def _random_J(S: Session, M: MiddleElements, rng: random.Random, reps: list[LocalMatrix]) -> LocalMatrix:
    k = rng.randint(-2, 2)
    return M.beta_power(k) * M.embed_residue(rng.randrange(1, S.q * S.q)) * rng.choice(reps)


def _random_N(S: Session, n: int, rng: random.Random, lo: int, hi: int) -> LocalMatrix:
    u = LocalMatrix.identity(S.k, n)
    for i in range(n):
        for j in range(i + 1, n):
            v = rng.randint(lo, hi)
            u = u.with_entry(i, j, FieldElem.make(S.k, v, [rng.randrange(S.q) for _ in range(2)], None))
    return u


def _lift_check(S: Session, N: int, p1: MiddleParams, p2: MiddleParams, seed: int, samples: int = 40) -> dict:
    M1, M2 = MiddleElements(S, N, p1.c, p1.d), MiddleElements(S, N, p2.c, p2.d)
    rng = random.Random(seed + 11)
    reps = list(filtration_reps(S, M1.spec, 1, 2))
    compared, mismatches = 0, []
    for _ in range(samples):
        h = _random_J(S, M1, rng, reps)
        try:
            e2 = lambda_middle_exponent(S, M2, p2, h)
        except NotInGroup:
            continue
        e1 = lambda_middle_exponent(S, M1, p1, h)
        compared += 1
        if e1 != e2:
            mismatches.append({"lambda_1": e1, "lambda_2": e2})
    return {"compared": compared, "mismatches": mismatches[:5]}


def _bessel_assertion(S: Session, N: int, p: MiddleParams, seed: int, samples: int = 4) -> dict:
    M = MiddleElements(S, N, p.c, p.d)
    W = WhittakerFn.middle(S, N, p)
    rng = random.Random(seed + 17)
    reps = list(filtration_reps(S, M.spec, 1, 2))
    one = LocalMatrix.identity(S.k, M.n)
    j1 = bessel_average_middle(S, M, p, one) == S.K.one
    law, agrees_w = True, True
    for _ in range(samples):
        g = _random_J(S, M, rng, reps)
        # h in N cap U^1: strictly upper entries inside the radical
        h = one
        bounds = M.spec.power(1).bounds
        for i in range(M.n):
            for j in range(i + 1, M.n):
                b = bounds[i][j]
                h = h.with_entry(i, j, FieldElem.make(S.k, b, [rng.randrange(S.q)], None))
        jg = bessel_average_middle(S, M, p, g)
        jhg = bessel_average_middle(S, M, p, h * g)
        law &= jhg == S.scalar(psi_n_exponent(S, h)) * jg
        e = W.exponent(g)
        agrees_w &= e is not None and jg == S.scalar(e)
    return assertion("bessel-identities", j1 and law and agrees_w,
                     {"J(1)=1": j1, "J(hg)=Psi(h)J(g)": law, "J=W on J": agrees_w, "samples": samples})


def _transformation_assertion(S: Session, N: int, p: MiddleParams, seed: int, samples: int = 20) -> dict:
    M = MiddleElements(S, N, p.c, p.d)
    W = WhittakerFn.middle(S, N, p)
    rng = random.Random(seed + 23)
    reps = list(filtration_reps(S, M.spec, 1, 2))
    left, right = True, True
    for _ in range(samples):
        g = _random_N(S, M.n, rng, -2, 1) * _random_J(S, M, rng, reps)
        e = W.exponent(g)
        u = _random_N(S, M.n, rng, -2, 1)
        e2 = W.exponent(u * g)
        left &= e is not None and e2 == (e + psi_n_exponent(S, u)) % S.m
        j = _random_J(S, M, rng, reps)
        e3 = W.exponent(g * j)
        right &= e3 == (e + lambda_middle_exponent(S, M, p, j)) % S.m
    return assertion("whittaker-transformation", left and right,
                     {"W(ug)=psi(u)W(g)": left, "W(gj)=W(g)Lambda(j)": right, "samples": samples})


# ---------------------------------------------------------------------------
# gamma command


def parse_fbar(S: Session, text: str) -> tuple[int, int]:
    try:
        c, d = (int(x) for x in text.split(","))
    except ValueError as exc:
        raise UsageError(f"--f expects c,d (got {text!r})") from exc
    c, d = c % S.q, d % S.q
    if not is_irreducible_quadratic(S.k, c, d):
        raise UsageError("f̄ reducible over F_q")
    return c, d


def parse_twist(S: Session, text: str):
    """trivial | tame:nu=e,lam=order:j | simple:u=..,phi=..,zetap=order:j | xi:label."""
    if text == "trivial":
        return "gl1", trivial_character(S)
    try:
        t = Twist.parse(text)
    except (ValueError, KeyError) as exc:
        raise UsageError(f"malformed twist {text!r}") from exc
    if t.kind == "simple" and not 0 < t.key[0] < S.q:
        raise UsageError("simple twist needs u in F_q^x")
    try:
        obj = twist_object(S, t)
    except KeyError as exc:
        labels = ", ".join(chi.label for chi in build_xi_middle(S))
        raise UsageError(f"unknown xi character {t.key[0]!r}; choose from {labels}") from exc
    return ("xi" if t.kind == "xi" else "glN" if t.kind == "simple" else "gl1"), obj


def cmd_gamma(args: argparse.Namespace) -> int:
    sc = build_config(args)
    S = sc.session()
    c, d = parse_fbar(S, args.f)
    try:
        zeta = RootParam.parse(args.zeta)
    except ValueError as exc:
        raise UsageError(f"--zeta expects order:e (got {args.zeta!r})") from exc
    p = _middle_params(S, c, d, args.chi % (S.q * S.q - 1), zeta)
    kind, obj = parse_twist(S, args.twist)

    def compute(cfg: IntegrationConfig):
        if kind == "xi":
            return GammaEngine(S, sc.N, jiang_window(cfg, sc.N, obj)).via_translates(p, obj)
        eng = GammaEngine(S, sc.N, cfg)
        return eng.gl1(p, obj) if kind == "gl1" else eng.glN(p, obj)

    res = compute(sc.cfg)
    report = {"schema_version": SCHEMA_VERSION, "session": sc.describe(), "params": p.to_json(),
              "twist": args.twist, "result": res.to_json()}
    code = 0
    if args.verify_stabilized:
        report["stabilization"] = verify_stabilized(compute, sc.cfg)
        code = 0 if report["stabilization"]["stable"] else 1
    emit(sc, report)
    return code


# ---------------------------------------------------------------------------
# verify command


def run_suite(name: str, sc: SessionConfig) -> dict:
    if name == "props":
        return suite_props(sc)
    if name == "lemmas":
        return suite_lemmas(sc)
    if name == "jiang":
        return suite_jiang(sc)
    if name == "conductor":
        return suite_conductor(sc)
    if name == "theorem-main":
        return suite_theorem_main(sc)
    if name == "infra":
        return suite_infra(sc)
    raise UsageError(f"unknown suite {name!r}")


def cmd_verify(args: argparse.Namespace) -> int:
    sc = build_config(args)
    t0 = time.perf_counter()
    report = run_suite(args.suite, sc)
    log.info("suite %s finished in %.1f s", args.suite, time.perf_counter() - t0)
    emit(sc, report)
    bad = first_failure(report)
    for a in report["assertions"]:
        print(f"{a['status'].upper():15s} {a['id']}", file=sys.stderr)
    if bad is not None:
        print(f"first failing assertion: {bad['id']}", file=sys.stderr)
        return 1
    return 0


def emit(sc: SessionConfig, report: dict) -> None:
    if sc.fmt == "csv":
        if "experiment" not in report:
            raise UsageError("CSV output is available for the theorem-main report")
        text = report_csv(report["experiment"])
    else:
        text = json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if sc.out:
        with open(sc.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# argument parsing


def _window(text: str) -> tuple[int, int]:
    lo, hi = (int(x) for x in text.split(","))
    return lo, hi


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--q", type=int, help="residue field size (prime power)")
    p.add_argument("--N", type=int, help="rank N >= 2; the middle family lives on GL(2N)")
    p.add_argument("--precision", type=int, help="default t-adic precision (overrides GAMMALAB_PRECISION)")
    p.add_argument("--m-zeta", dest="m_zeta", type=int, help="order of the roots of unity zeta (default 8)")
    p.add_argument("--window", type=_window, help="valuation window lo,hi for the integration cells")
    p.add_argument("--unit-depth", dest="unit_depth", type=int, help="unit filtration depth of the cells")
    p.add_argument("--x-extra", dest="x_extra", type=int, help="extra digits below the x lattice")
    p.add_argument("--haar-scale", dest="haar_scale", type=Fraction, help="vol(GL(n,O)) normalization")
    p.add_argument("--config", help="key=value file mirroring the flags; flags take precedence")
    p.add_argument("--out", help="write the report to FILE instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), help="report format (csv only for theorem-main)")
    p.add_argument("--jobs", type=int, help="worker processes; results do not depend on it")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gammalab", description="Exact twisted gamma factors of middle supercuspidals.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gamma", help="gamma factor of one middle supercuspidal against one twist")
    _common(g)
    g.add_argument("--f", required=True, help="residues c,d of f = X^2 - dX - c (irreducible over F_q)")
    g.add_argument("--chi", type=int, default=0, help="exponent e of chi on k_L^x (chi(gen) = zeta_(q^2-1)^e)")
    g.add_argument("--zeta", default="8:0", help="zeta as order:e")
    g.add_argument("--twist", default="trivial",
                   help="trivial | tame:nu=e,lam=order:j | simple:u=U,phi=E,zetap=order:j | xi:LABEL")
    g.add_argument("--verify-stabilized", action="store_true", help="recompute on a widened configuration")
    g.set_defaults(func=cmd_gamma)

    v = sub.add_parser("verify", help="run a verification suite and write its JSON report")
    _common(v)
    v.add_argument("suite", choices=SUITES)
    v.add_argument("--oracle", action="store_true", help="lemmas: compare against the brute-force oracle")
    v.add_argument("--samples", type=int, help="lemmas: number of random matrices")
    v.add_argument("--seed", type=int, help="seed for the random samples")
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CostGuardExceeded as exc:
        print(f"cost guard: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
