import json

import pytest

from gammalab.cli import build_config, build_parser, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gamma_trivial_twist(capsys):
    code, out, _ = run(capsys, "gamma", "--q", "3", "--N", "2", "--f", "2,0", "--chi", "1", "--zeta", "8:1",
                       "--twist", "trivial")
    assert code == 0
    mono = json.loads(out)["result"]["monomial"]
    assert mono["coefficient_polar"] == "3*zeta_72^63"
    assert (mono["degree"], mono["s_exponent"]) == (2, -2)


def test_gamma_output_is_deterministic(capsys):
    argv = ("gamma", "--q", "2", "--f", "1,1", "--twist", "simple:u=1,phi=0,zetap=8:3")
    a = run(capsys, *argv)
    b = run(capsys, *argv)
    assert a[0] == 0 and a[1] == b[1]


def test_reducible_fbar_is_usage_error(capsys):
    code, _, err = run(capsys, "gamma", "--q", "3", "--f", "2,1")
    assert code == 2 and "reducible" in err


def test_unknown_twist_is_usage_error(capsys):
    code, _, _ = run(capsys, "gamma", "--q", "2", "--f", "1,1", "--twist", "cubic")
    assert code == 2


def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# session\nq = 3\nprecision = 10\nwindow = -4,3\n")
    parser = build_parser()
    args = parser.parse_args(["verify", "props", "--config", str(cfg), "--precision", "12"])
    sc = build_config(args, {"GAMMALAB_PRECISION": "9"})
    assert (sc.q, sc.precision, sc.cfg.valuation_window) == (3, 12, (-4, 3))
    args = parser.parse_args(["verify", "props", "--config", str(cfg)])
    assert build_config(args, {"GAMMALAB_PRECISION": "9"}).precision == 10
    args = parser.parse_args(["verify", "props"])
    assert build_config(args, {"GAMMALAB_PRECISION": "9"}).precision == 9


def test_bad_config_entry(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = run(capsys, "verify", "props", "--config", str(cfg))
    assert code == 2 and "colour" in err


def test_theorem_main_jobs_independent(tmp_path, capsys):
    outs = []
    for jobs in ("1", "2"):
        path = tmp_path / f"tm{jobs}.json"
        code, _, _ = run(capsys, "verify", "theorem-main", "--q", "2", "--jobs", jobs, "--out", str(path))
        assert code == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_theorem_main_csv(tmp_path, capsys):
    path = tmp_path / "tm.csv"
    code, _, _ = run(capsys, "verify", "theorem-main", "--q", "2", "--out", str(path))
    assert code == 0 and path.read_text().startswith("c,d,chi,zeta,twist")


def test_verify_props_reports_status_lines(capsys):
    code, out, err = run(capsys, "verify", "props", "--q", "2")
    assert code == 0
    rep = json.loads(out)
    assert rep["ok"] and {a["status"] for a in rep["assertions"]} == {"pass"}
    assert err.splitlines()[0].split() == ["PASS", "tame-psi-volume"]
