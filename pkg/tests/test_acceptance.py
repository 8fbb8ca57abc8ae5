"""Acceptance criteria, one PASS/FAIL line each.

Every comparison is exact equality in Q(zeta_m)[sqrt q]; there is no tolerance
to tune. Time bounds are checked where a criterion states one.
"""
import pytest

from gammalab.cli import (
    build_config,
    build_parser,
    suite_infra,
    suite_jiang,
    suite_lemmas,
    suite_props,
    suite_theorem_main,
)

TOLERANCE = 0  # exact arithmetic throughout
TAME_PSI_SECONDS = 1.0
SIMPLE_PSI_SECONDS = 60.0
LEMMA_SAMPLES = 200
FAMILY_SIZE = {2: 24, 3: 192}


def config(suite: str, *flags: str):
    return build_config(build_parser().parse_args(["verify", suite, *flags]), {})


def by_id(report: dict) -> dict:
    return {a["id"]: a for a in report["assertions"]}


@pytest.fixture(scope="module", params=[2, 3], ids=["q2", "q3"])
def props(request):
    q = request.param
    return q, by_id(suite_props(config("props", "--q", str(q))))


@pytest.fixture(scope="module")
def theorem_main():
    return {q: suite_theorem_main(config("theorem-main", "--q", str(q))) for q in (2, 3)}


def test_c1_tame_psi_is_volume(props, record):
    q, a = props
    row = a["tame-psi-volume"]
    fast = row["detail"]["max_seconds"] < TAME_PSI_SECONDS
    assert record(f"C1 q={q} tame Psi = 1/(q-1), {row['detail']['checked']} cases",
                  row["status"] == "pass" and fast, f"max {row['detail']['max_seconds']}s")


def test_c2_tame_gamma_closed_form(props, record):
    q, a = props
    row = a["tame-gamma-closed-form"]
    sign = row["detail"]["sign"]
    assert record(f"C2 q={q} tame gamma = zeta^-1 lambda(-c^-1 t^2) q X^2, {row['detail']['checked']} cases",
                  row["status"] == "pass",
                  f"minus sign matches {sign['minus_matches']}, plus sign matches "
                  f"{sign['plus_matches_on_sign_sensitive']}/{sign['sign_sensitive_cases']} sign-sensitive")


def test_c3_simple_psi_is_volume(props, record):
    q, a = props
    row = a["simple-psi-volume"]
    slowest = max(row["detail"]["seconds"].values())
    assert record(f"C3 q={q} simple Psi = vol(U^1(I_N)) for all u", row["status"] == "pass"
                  and slowest <= SIMPLE_PSI_SECONDS, f"max {slowest}s")


def test_c4_simple_gamma_factorization(props, record):
    q, a = props
    lit, signed, cond = (a["simple-gamma-factorization"], a["simple-gamma-factorization-signed"],
                         a["simple-gamma-conductor"])
    record(f"C4' q={q} M * phi(-1) independent of (chi, zeta, phi, zeta')", signed["status"] == "pass")
    record(f"C4 q={q} deg_X gamma = 2N, f_abs = 12", cond["status"] == "pass")
    assert record(f"C4 q={q} M independent of (chi, zeta, phi, zeta')", lit["status"] == "pass",
                  f"u with varying M: {lit['detail']['u_with_varying_M']}")
    assert cond["status"] == "pass"


def test_c5_support_lemmas_against_oracle(record):
    rep = suite_lemmas(config("lemmas", "--q", "2", "--oracle", "--samples", str(LEMMA_SAMPLES)))
    a = by_id(rep)
    ok = True
    for shape in ("gl1", "glN"):
        rows = [a[f"support-{shape}-{part}"] for part in ("agreement", "witness-stratum", "coverage")]
        d = rows[0]["detail"]
        ok &= record(f"C5 q=2 {shape} support predicate = oracle", all(r["status"] == "pass" for r in rows),
                     f"{d.get('samples')} samples, {d.get('accepted')} accepted")
    assert ok


def test_c6_stability_formula(theorem_main, record):
    rep = suite_jiang(config("jiang", "--q", "2"))
    rows = [a for a in rep["assertions"]]
    wild = [r for r in rows if r["status"] != "not-applicable"]
    trivial = [r for r in rows if r["status"] == "not-applicable"]
    ok = record(f"C6 q=2 translates = omega(c_def)^-1 tate^2N, {len(wild)} wild (pi, chi)",
                bool(wild) and all(r["status"] == "pass" for r in wild))
    checks = [c for c in theorem_main[3]["experiment"]["jiang_checks"] if "jiang" in c]
    ok &= record(f"C6 q=3 translates = omega(c_def)^-1 tate^2N, {len(checks)} wild (pi, chi)",
                 bool(checks) and all(c["jiang"] and not c["cross_check_failed"] for c in checks))
    # the trivial member of Xi has no defining element, so the formula has no value to compare
    ok &= record(f"C6 trivial character in Xi ({len(trivial)} at q=2)", False,
                 "no c_def; formula undefined, gamma computed but not comparable")
    assert ok


@pytest.mark.parametrize("q", [2, 3])
def test_c7_fingerprints_injective_and_invertible(theorem_main, record, q):
    a = by_id(theorem_main[q])
    count = a["family-size"]["detail"]["count"]
    ok = count == FAMILY_SIZE[q] and all(a[i]["status"] == "pass" for i in
                                         ("family-size", "fingerprint-injectivity", "parameter-round-trip"))
    assert record(f"C7 q={q} {count} fingerprints, no collisions, exact recovery", ok)


def test_c8_infrastructure(record):
    a = by_id(suite_infra(config("infra", "--q", "2")))
    ok = True
    for ident in ("stabilization", "measure-invariance", "lift-independence-lambda", "lift-independence-gamma",
                  "bessel-identities", "whittaker-transformation"):
        ok &= record(f"C8 q=2 {ident}", a[ident]["status"] == "pass")
    assert ok
