import json
import subprocess
import sys

import numpy as np
import pytest

from dhmaps.cli import ConfigError, convert_params, main, parse_tols


def run(args, capsys):
    code = main(args)
    return code, capsys.readouterr().out


def test_list_cases(capsys):
    code, out = run(["list-cases"], capsys)
    assert code == 0 and "theorem3" in out.split()


def test_unknown_case_exit_two(capsys, tmp_path):
    out_file = tmp_path / "r.json"
    code, _ = run(["verify", "--case", "unknown", "--out", str(out_file)], capsys)
    assert code == 2
    assert json.loads(out_file.read_text())["error"]["condition"] == "unknown case"


@pytest.mark.parametrize("extra", [["--fd-step", "1"], ["--fd-step", "1e-9"], ["--grid", "1x4"],
                                   ["--tol", "nonsense"], ["--params", "/nonexistent.json"]])
def test_bad_configuration_exit_two(extra, capsys):
    code, out = run(["verify", "--case", "example3-intrinsic"] + extra, capsys)
    assert code == 2 and out.startswith("error: configuration")


def test_validation_failure_names_condition(tmp_path, capsys):
    p = tmp_path / "p.json"
    p.write_text(json.dumps({"a": [0, 0], "b": [0, 0]}))
    code, out = run(["verify", "--case", "theorem3", "--params", str(p), "--json"], capsys)
    assert code == 2
    assert json.loads(out)["error"]["condition"].startswith("Re(a conj(d_0)")


def test_intrinsic_case_passes_with_report(tmp_path, capsys):
    out_file = tmp_path / "r.json"
    code, _ = run(["verify", "--case", "example3-intrinsic", "--out", str(out_file)], capsys)
    assert code == 0
    rep = json.loads(out_file.read_text())
    assert {"case", "params", "grid", "fd_step", "residuals", "criteria", "wall_time_ms"} <= set(rep)
    assert rep["grid"] == [5, 5, 5] and rep["fd_step"] == 1e-4
    assert set(rep["residuals"]["twistor"]) == {"max", "mean", "tol", "pass"}
    assert not list(tmp_path.glob(".dhmaps-*"))  # no temp files left behind


def test_residual_failure_exit_one(capsys):
    code, out = run(["verify", "--case", "theorem3-broken-eq5", "--grid", "4x3"], capsys)
    assert code == 1 and out.rstrip().endswith("FAIL")


def test_tolerance_override_changes_outcome(capsys):
    code, _ = run(["verify", "--case", "example3-intrinsic", "--tol", "twistor=-1"], capsys)
    assert code == 1


def test_params_file_complex_values(tmp_path, capsys):
    p = tmp_path / "p.json"
    w = np.exp(1j * np.pi / 3)
    p.write_text(json.dumps({"r": [0.5] * 4, "mu": [[1, 0], [-1, 0], [w.real, w.imag], [-w.real, -w.imag]],
                             "Psi1": [[0, 0], [1, 0]]}))
    code, out = run(["verify", "--case", "example1", "--params", str(p), "--grid", "2x2", "--json"], capsys)
    assert code == 0
    assert json.loads(out)["params"]["Psi1"] == [[0.0, 0.0], [1.0, 0.0]]


def test_convert_params_rules():
    got = convert_params({"R": 1.0, "m": 1.0, "a": [1, 2], "c_-1": [0, 1], "d_0": 2.0,
                          "Psi0": [[1, 0], [0, 1]], "r": [0.5, 0.5], "balance_residual": 3.0})
    assert got["a"] == 1 + 2j and got["m"] == 1 and isinstance(got["m"], int)
    assert got["c"] == {-1: 1j} and got["d"] == {0: 2.0}
    assert np.array_equal(got["Psi0"], [1, 1j]) and got["r"].dtype == float
    assert "balance_residual" not in got
    with pytest.raises(ConfigError):
        convert_params([1, 2])
    with pytest.raises(ConfigError):
        convert_params({"a": [1, 2, 3]})
    assert parse_tols(["x=1e-3", "y=2"]) == {"x": 1e-3, "y": 2.0}


def test_unwritable_output(capsys):
    code, _ = run(["list-cases", "--out", "/nonexistent/dir/r.json"], capsys)
    assert code == 2


def test_properties_subcommand_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["properties", "--seed", "7", "--trials", "20", "--out", str(a)]) == 0
    assert main(["properties", "--seed", "7", "--trials", "20", "--out", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    code, out = run(["properties", "--trials", "0"], capsys)
    assert code == 2


def test_convergence_subcommand(capsys):
    code, _ = run(["convergence", "--case", "example3-intrinsic", "--grid", "2x2x2"], capsys)
    assert code == 0
    code, _ = run(["convergence", "--case", "example3-intrinsic", "--steps", "1e-2,1e-3"], capsys)
    assert code == 2


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "dhmaps.cli", "list-cases"], capture_output=True, text=True)
    assert res.returncode == 0 and "example2" in res.stdout
