import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from invspec.cli import exit_code_for, load_problem
from invspec.errors import (ConvergenceError, InputError, ResonantIndexError,
                            SingularMatrixError, VerificationError)


def run_cli(*args, cwd=None):
    return subprocess.run([sys.executable, "-m", "invspec.cli", *args],
                          capture_output=True, text=True, cwd=cwd)


def write_problem(path: Path, mode: str, m: int, n_max: int, entries):
    doc = {"schema_version": "1", "mode": mode, "m": m, "N": n_max, "entries": entries}
    path.write_text(json.dumps(doc))


def potential_entry(gamma, n, value):
    return {"gamma": gamma, "n": n, "re": value.real, "im": value.imag}


def test_forward_zero_potential(tmp_path):
    inp = tmp_path / "p.json"
    out = tmp_path / "s.json"
    write_problem(inp, "potential", 2, 3, [])
    result = run_cli("forward", "--input", str(inp), "--output", str(out))
    assert result.returncode == 0, result.stderr
    doc = json.loads(out.read_text())
    assert doc["mode"] == "spectral"
    assert all(e["re"] == 0.0 and e["im"] == 0.0 for e in doc["entries"])


def test_forward_single_mode_anchor(tmp_path):
    inp = tmp_path / "p.json"
    out = tmp_path / "s.json"
    write_problem(inp, "potential", 1, 3, [potential_entry(0, 1, 0.1 + 0j)])
    result = run_cli("forward", "--input", str(inp), "--output", str(out),
                     "--emit-v", str(tmp_path / "v.json"))
    assert result.returncode == 0, result.stderr
    doc = json.loads(out.read_text())
    s11 = next(e for e in doc["entries"] if e["j"] == 1 and e["n"] == 1)
    assert s11["re"] == pytest.approx(0.0, abs=1e-15)
    assert s11["im"] == pytest.approx(0.1, abs=1e-15)
    vdoc = json.loads((tmp_path / "v.json").read_text())
    assert vdoc["mode"] == "vtable"
    assert all(e["n"] <= e["alpha"] for e in vdoc["entries"])


def test_forward_inverse_file_round_trip(tmp_path):
    inp = tmp_path / "p.json"
    spec = tmp_path / "s.json"
    back = tmp_path / "p2.json"
    entries = [potential_entry(0, 1, 0.02 - 0.01j), potential_entry(2, 2, 0.005j),
               potential_entry(1, 3, 0.002 + 0.001j)]
    write_problem(inp, "potential", 2, 4, entries)
    assert run_cli("forward", "--input", str(inp), "--output", str(spec)).returncode == 0
    result = run_cli("inverse", "--input", str(spec), "--output", str(back),
                     "--report", str(tmp_path / "rep.json"))
    assert result.returncode == 0, result.stderr
    p_in = load_problem(str(inp))
    p_out = load_problem(str(back))
    assert np.abs(p_in.coeffs - p_out.coeffs).max() <= 1e-8
    report = json.loads((tmp_path / "rep.json").read_text())
    assert report["contraction"]["contraction"] is True
    assert report["a_m"]["value"] > 0


def test_inverse_warns_without_contraction(tmp_path):
    inp = tmp_path / "s.json"
    write_problem(inp, "spectral", 1, 1, [{"j": 1, "n": 1, "re": 3.0, "im": 0.0}])
    result = run_cli("inverse", "--input", str(inp), "--output", str(inp.with_suffix(".out")))
    assert result.returncode == 0
    assert "contraction" in result.stderr


def test_det_zero_data(tmp_path):
    inp = tmp_path / "s.json"
    csv_out = tmp_path / "grid.csv"
    verdict_out = tmp_path / "verdict.json"
    write_problem(inp, "spectral", 1, 2, [])
    result = run_cli("det", "--input", str(inp), "--output", str(csv_out),
                     "--report", str(verdict_out), "--re-steps", "9", "--im-steps", "5")
    assert result.returncode == 0, result.stderr
    with open(csv_out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["re(z)", "im(z)", "re(D)", "im(D)", "|D|"]
    assert all(float(row[4]) == 1.0 for row in rows[1:])
    verdict = json.loads(verdict_out.read_text())
    assert verdict["zero_free"] is True
    assert verdict["winding"] == 0
    assert verdict["convention"] == "det(E-F)"


def test_det_rank_one_matches_closed_form(tmp_path):
    inp = tmp_path / "s.json"
    csv_out = tmp_path / "grid.csv"
    write_problem(inp, "spectral", 1, 1, [{"j": 1, "n": 1, "re": 0.4, "im": -0.2}])
    result = run_cli("det", "--input", str(inp), "--output", str(csv_out),
                     "--re-steps", "9", "--im-steps", "4", "--im-max", "6.0")
    assert result.returncode == 0, result.stderr
    with open(csv_out, newline="") as fh:
        rows = list(csv.reader(fh))[1:]
    for row in rows:
        z = complex(float(row[0]), float(row[1]))
        d = complex(float(row[2]), float(row[3]))
        assert abs(d - (1 + 1j * (0.4 - 0.2j) / 2 * np.exp(1j * z))) <= 1e-12


def test_det_planted_zero_winding(tmp_path):
    inp = tmp_path / "s.json"
    verdict_out = tmp_path / "verdict.json"
    value = -2 * np.e * 1j
    write_problem(inp, "spectral", 1, 1, [{"j": 1, "n": 1, "re": value.real, "im": value.imag}])
    result = run_cli("det", "--input", str(inp), "--output", str(tmp_path / "g.csv"),
                     "--report", str(verdict_out))
    assert result.returncode == 0, result.stderr
    verdict = json.loads(verdict_out.read_text())
    assert verdict["winding"] == 1
    assert verdict["zero_free"] is False


def test_det_exit_3_when_truncation_forced(tmp_path):
    inp = tmp_path / "s.json"
    entries = [{"j": 1, "n": n, "re": 0.8 ** n, "im": 0.0} for n in range(1, 21)]
    write_problem(inp, "spectral", 1, 20, entries)
    result = run_cli("det", "--input", str(inp), "--output", str(tmp_path / "g.csv"),
                     "--re-steps", "5", "--im-steps", "3", "--im-max", "2.0",
                     "--n-max", "5", "--det-tol", "1e-12")
    assert result.returncode == 3
    assert "not converged" in result.stderr


def test_verify_zero_potential_passes(tmp_path):
    inp = tmp_path / "p.json"
    report = tmp_path / "scorecard.json"
    write_problem(inp, "potential", 1, 6, [])
    result = run_cli("verify", "--input", str(inp), "--report", str(report))
    assert result.returncode == 0, result.stderr
    card = json.loads(report.read_text())
    assert card["all_pass"] is True
    assert {c["name"] for c in card["checks"]} == {
        "round_trip", "marchenko_residual", "jump_relation", "translation_law",
        "ode_residual_halving", "determinant_zero_free", "q0_trace"}


def test_verify_geometric_m1_passes(tmp_path):
    inp = tmp_path / "p.json"
    report = tmp_path / "scorecard.json"
    entries = [potential_entry(0, n, 0.05 * 2.0 ** -n + 0j) for n in range(1, 7)]
    write_problem(inp, "potential", 1, 6, entries)
    result = run_cli("verify", "--input", str(inp), "--report", str(report))
    assert result.returncode == 0, result.stderr
    card = json.loads(report.read_text())
    assert card["all_pass"] is True


def test_verify_exit_4_on_impossible_threshold(tmp_path):
    inp = tmp_path / "p.json"
    entries = [potential_entry(0, 1, 0.05 + 0j)]
    write_problem(inp, "potential", 1, 6, entries)
    result = run_cli("verify", "--input", str(inp), "--output", str(tmp_path / "c.json"),
                     "--round-tol", "1e-30", "--marchenko-tol", "1e-30")
    assert result.returncode == 4
    assert "round_trip" in result.stderr


def test_malformed_json_exit_1(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run_cli("forward", "--input", str(bad)).returncode == 1


def test_wrong_mode_exit_1(tmp_path):
    inp = tmp_path / "s.json"
    write_problem(inp, "spectral", 1, 2, [])
    assert run_cli("forward", "--input", str(inp)).returncode == 1


def test_schema_validation_rejects_duplicates_and_ranges(tmp_path):
    inp = tmp_path / "p.json"
    write_problem(inp, "potential", 1, 2,
                  [potential_entry(0, 1, 0.1 + 0j), potential_entry(0, 1, 0.2 + 0j)])
    assert run_cli("forward", "--input", str(inp)).returncode == 1
    write_problem(inp, "potential", 1, 2, [potential_entry(5, 1, 0.1 + 0j)])
    assert run_cli("forward", "--input", str(inp)).returncode == 1
    write_problem(inp, "spectral", 1, 2, [{"j": 0, "n": 1, "re": 0.1, "im": 0.0}])
    assert run_cli("inverse", "--input", str(inp)).returncode == 1


def test_exit_code_contract_mapping():
    assert exit_code_for(InputError("x")) == 1
    assert exit_code_for(ResonantIndexError("x", indices=(1, 2, 1))) == 2
    assert exit_code_for(SingularMatrixError("x", pivot_index=0)) == 2
    assert exit_code_for(ConvergenceError("x")) == 3
    assert exit_code_for(VerificationError("x", failed=["round_trip"])) == 4
    with pytest.raises(KeyError):
        exit_code_for(KeyError("unmapped"))


def test_outputs_are_deterministic(tmp_path):
    inp = tmp_path / "p.json"
    entries = [potential_entry(0, 1, 0.03 + 0.01j), potential_entry(0, 2, -0.004j)]
    write_problem(inp, "potential", 1, 4, entries)
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    assert run_cli("forward", "--input", str(inp), "--output", str(out1)).returncode == 0
    assert run_cli("forward", "--input", str(inp), "--output", str(out2)).returncode == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_json_round_trip_is_lossless(tmp_path):
    values = [0.1 + 0.2j, -1.0 / 3.0 + 1e-17j, 0.05 * 2.0 ** -7 - 0.123456789012345678j]
    inp = tmp_path / "p.json"
    write_problem(inp, "potential", 1, 3,
                  [potential_entry(0, n, v) for n, v in enumerate(values, start=1)])
    p = load_problem(str(inp))
    from invspec.cli import _problem_doc
    doc = _problem_doc(p)
    (tmp_path / "round.json").write_text(json.dumps(doc))
    p2 = load_problem(str(tmp_path / "round.json"))
    assert np.array_equal(p.coeffs, p2.coeffs)
