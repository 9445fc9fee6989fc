from __future__ import annotations

import json
import subprocess
import sys

import pytest

from regfrac import __version__
from regfrac.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_exponents_json(capsys):
    code, out, _ = run(capsys, "exponents", "--s", "0.5", "--k", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["version"] == __version__
    assert doc["config"]["subcommand"] == "exponents" and doc["config"]["s"] == 0.5
    beta = doc["result"]["beta"]
    assert beta[0] == 0
    assert [round(b, 5) for b in beta[1:]] == [1.43030, 2.45902, 3.47089]


def test_exponents_sweep_csv(capsys):
    code, out, _ = run(capsys, "exponents", "--sweep", "0.2:0.4:0.1", "--k", "2", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("# ") and json.loads(lines[0][2:])["config"]["format"] == "csv"
    assert lines[1] == "s,alpha_s,beta0,beta1,beta2"
    assert [ln.split(",")[0] for ln in lines[2:]] == ["0.2", "0.3", "0.4"]


def test_coeff(capsys):
    code, out, _ = run(capsys, "coeff", "--beta", "0", "--s", "0.7")
    assert code == 0
    assert abs(json.loads(out)["result"]["C_reg"]) < 1e-12


def test_coeff_pole_is_invalid(capsys):
    code, _, err = run(capsys, "coeff", "--beta", "1.5", "--s", "0.75")
    assert code == 1 and "pole" in err


def test_eigen(capsys):
    code, out, _ = run(capsys, "eigen", "--s", "0.5", "--modes", "2", "--n", "128")
    assert code == 0
    res = json.loads(out)["result"]
    assert res["lambdas"][1] == pytest.approx(2.0457, abs=2e-3)


def test_verify_power(capsys):
    code, out, _ = run(capsys, "verify-power", "--s", "0.75", "--beta", "1", "--x", "2")
    assert code == 0
    res = json.loads(out)["result"]
    assert res["passed"] is True and res["relative_error"] < 1e-6


def test_verify_power_mismatch_exits_one(capsys):
    code, out, err = run(capsys, "verify-power", "--s", "0.75", "--beta", "1", "--tol", "1e-300")
    assert code == 1 and "validation failed" in err
    assert json.loads(out)["result"]["passed"] is False


def test_solve1d_neumann(capsys):
    code, out, _ = run(capsys, "solve1d", "--bc", "neumann", "--s", "0.6", "--f", "cospix", "--n", "128")
    assert code == 0
    res = json.loads(out)["result"]
    assert res["mu"] == 2.0
    assert abs(res["fit"]["a0"]) < 1e-2
    assert {"slope", "slopes", "inconclusive"} <= set(res["holder"])


def test_solve1d_dirichlet_small_s(capsys):
    code, _, err = run(capsys, "solve1d", "--bc", "dirichlet", "--s", "0.4", "--f", "const1", "--n", "64")
    assert code == 1
    assert "Dirichlet requires s > 1/2" in err


def test_solve1d_csv_then_fit(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("REGFRAC_OUTPUT_DIR", str(tmp_path))
    code, out, _ = run(capsys, "solve1d", "--bc", "dirichlet", "--s", "0.75", "--f", "const1", "--n", "256",
                       "--format", "csv", "--output", "sol.csv")
    assert code == 0 and out == ""
    path = tmp_path / "sol.csv"
    assert path.read_text().splitlines()[1] == "x,u,u_over_delta"
    code, out, _ = run(capsys, "fit", "--input", str(path), "--s", "0.75")
    assert code == 0
    assert abs(json.loads(out)["result"]["c0"]) < 1e-3


def test_fit_failure_is_numeric(capsys, tmp_path):
    p = tmp_path / "u.csv"
    p.write_text("x,u\n0,1\n0.1,2\n0.2,3\n")
    code, _, err = run(capsys, "fit", "--input", str(p), "--s", "0.75", "--window", "0.2")
    assert code == 2 and "FitError" in err


def test_disk_report(capsys):
    code, out, _ = run(capsys, "disk", "--s", "0.75", "--n", "64")
    assert code == 0
    res = json.loads(out)["result"]
    assert {"psi1", "dpsi1", "ratio", "dispersion"} <= set(res)
    assert res["psi1"] > 0


def test_bad_input_exit_codes(capsys):
    assert run(capsys, "nosuch")[0] == 1
    assert run(capsys, "coeff", "--beta", "1", "--s", "0.5", "--bogus")[0] == 1
    assert run(capsys, "coeff", "--beta", "1", "--s", "1.5")[0] == 1
    assert run(capsys, "exponents")[0] == 1
    assert run(capsys, "exponents", "--sweep", "a:b")[0] == 1
    assert run(capsys, "disk", "--s", "0.4", "--n", "32")[0] == 1


def test_deterministic_bytes(capsys):
    args = ("solve1d", "--bc", "neumann", "--s", "0.3", "--n", "64")
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert a == b


def test_selftest_quick(capsys):
    code, out, err = run(capsys, "selftest", "--quick")
    assert code == 0
    res = json.loads(out)["result"]
    assert [r["id"] for r in res] == [1, 2, 3, 4, 6]
    assert all(r["passed"] for r in res)
    assert "seconds" not in res[0]
    assert err.count("[PASS]") == 5


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "regfrac", "--version"], capture_output=True, text=True)
    assert p.returncode == 0 and __version__ in p.stdout
