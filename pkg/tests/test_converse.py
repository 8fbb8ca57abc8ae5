import pytest

from gammalab.converse import (
    Scope,
    Twist,
    central_char_separation,
    enumerate_params,
    fingerprint,
    recover,
    report_csv,
    theorem_main_experiment,
    twist_family,
)
from gammalab.rankin import GammaEngine


@pytest.mark.parametrize("text", ["xi:chi[t^-3]", "tame:nu=1,lam=4:3", "simple:u=1,phi=0,zetap=8:5"])
def test_twist_label_round_trip(text):
    assert Twist.parse(text).label() == text


def test_twist_parse_rejects_garbage():
    with pytest.raises(ValueError):
        Twist.parse("cubic:1")


def test_recover_inverts_fingerprint_q2(S2):
    scope = Scope(2, 2)
    eng = GammaEngine(S2, 2)
    twists = twist_family(S2, scope)
    cache: dict = {}
    params = enumerate_params(S2, scope)
    assert len(params) == 24
    for p in params[::5]:
        fp = fingerprint(eng, p, twists, cache)
        assert recover(fp, S2, eng).key() == p.key()


def test_central_character_separation_q2(S2):
    eng = GammaEngine(S2, 2)
    params = enumerate_params(S2, Scope(2, 2))
    rep = central_char_separation(eng, params[0], params[1])
    assert rep["implication_holds"]
    same = central_char_separation(eng, params[0], params[0])
    assert same["same_xi_gamma"] and same["same_central_character"]


def test_theorem_main_q2_and_csv():
    rep = theorem_main_experiment(2)
    assert rep["count"] == 24 and rep["injectivity"] and rep["round_trip"]
    text = report_csv(rep)
    lines = text.splitlines()
    assert lines[0] == "c,d,chi,zeta,twist,coefficient,degree"
    assert len(lines) == 1 + sum(len(f["entries"]) for f in rep["fingerprints"])
