import csv
import io
import json
import subprocess
import sys

import pytest

from qspaceform.cli import main, mc_rtol, parse_range

CURVATURE_CHECKS = {
    "antisymmetry_first_pair", "antisymmetry_last_pair", "pair_symmetry", "first_bianchi",
    "cri1_vs_riemann", "cri2_vs_riemann", "total_density_closed_form", "total_density_vs_operator",
    "collapsed_curvature_identity", "constant_curvature_reduction",
}


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_identities_example(capsys):
    code, out = run(capsys, "identities", "--n", "2", "--c", "-3", "--trials", "1000", "--seed", "7")
    doc = json.loads(out)
    assert code == 0
    assert doc["config"]["n"] == 2 and doc["config"]["seed"] == 7
    for chk in doc["checks"]:
        assert chk["pass"]
        assert set(chk) >= {"name", "paper_ref", "tolerance", "pass"}
        assert ("residual" in chk) != ("value" in chk)
        if "residual" in chk:
            assert chk["residual"] <= 1e-10


def test_identities_flat_is_exact(capsys):
    code, out = run(capsys, "identities", "--n", "1", "--c", "0", "--trials", "100")
    assert code == 0
    checks = {c["name"]: c for c in json.loads(out)["checks"]}
    assert CURVATURE_CHECKS <= set(checks)
    for name in CURVATURE_CHECKS:
        assert checks[name]["residual"] == 0.0


@pytest.mark.parametrize(
    "argv",
    [
        ["identities", "--n", "0"],
        ["curvature", "--c", "inf"],
        ["identities", "--trials", "0"],
        ["sphere", "--c", "4", "--samples", "0"],
        ["report", "--n-range", "2..1"],
        ["report", "--n-range", "1-3"],
        ["stability", "--workers", "0"],
        ["bogus"],
    ],
)
def test_invalid_flags_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_sphere_nonpositive_c_message(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sphere", "--c", "-4"])
    assert exc.value.code == 2
    assert "quotients of quaternion hyperbolic space" in capsys.readouterr().err


def test_sphere_unit_curvature(capsys):
    code, out = run(capsys, "sphere", "--c", "1", "--samples", "100000", "--seed", "0")
    doc = json.loads(out)
    assert code == 0
    assert doc["results"]["lambda1_estimate"] == pytest.approx(4.0, rel=0.03)
    assert doc["verdict"] == "unstable"


def test_mc_tolerance_scaling():
    assert mc_rtol(0.01, 10**6) == 0.01
    assert mc_rtol(0.01, 10**8) == 0.01
    assert mc_rtol(0.01, 10**4) == pytest.approx(0.1)


def test_parse_range():
    assert parse_range("1..5") == range(1, 6)
    assert parse_range(" 3 .. 3 ") == range(3, 4)
    for bad in ("0..2", "2..1", "a..b", "1..", "1.5..2"):
        with pytest.raises(ValueError):
            parse_range(bad)


def test_report_csv_projective(capsys):
    code, out = run(capsys, "report", "--n-range", "1..5", "--c", "4", "--format", "csv", "--trials", "20")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert out.splitlines()[0] == "n,c,classification,verdict,lambda1,einstein_constant,margin"
    assert [int(r["n"]) for r in rows] == [1, 2, 3, 4, 5]
    assert all(r["verdict"] == "unstable" and float(r["margin"]) == -8 for r in rows)


def test_report_json_hyperbolic(capsys):
    code, out = run(capsys, "report", "--n-range", "1..3", "--c", "-1", "--trials", "20")
    rows = json.loads(out)
    assert code == 0 and len(rows) == 3
    for row in rows:
        assert list(row) == ["n", "c", "classification", "verdict", "lambda1", "einstein_constant", "margin"]
        assert row["verdict"] == "stable-index-zero" and row["margin"] is None


def test_stability_text_and_csv(capsys):
    code, out = run(capsys, "stability", "--n", "3", "--c", "0", "--trials", "20", "--format", "text")
    assert code == 0 and "verdict: stable" in out
    code, out = run(capsys, "stability", "--n", "2", "--c", "4", "--trials", "20", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert {r["name"] for r in rows} >= {"smith_margin_negative", "collapsed_curvature_identity"}


def test_stability_with_numerics(capsys):
    code, out = run(capsys, "stability", "--n", "1", "--c", "4", "--trials", "20",
                    "--samples", "100000", "--seed", "1", "--attach-numerics")
    doc = json.loads(out)
    assert code == 0
    names = {c["name"] for c in doc["checks"]}
    assert {"lambda1_rayleigh", "instability_witness_hessian"} <= names
    assert doc["results"]["report"]["lambda1_source"] == "numerical"


def test_failing_check_gives_exit_1(capsys):
    code, out = run(capsys, "sphere", "--c", "4", "--samples", "2000", "--seed", "0", "--rtol", "1e-9")
    assert code == 1
    assert any(not c["pass"] for c in json.loads(out)["checks"])


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qspaceform", "curvature", "--n", "1", "--trials", "10"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["config"]["subcommand"] == "curvature"
