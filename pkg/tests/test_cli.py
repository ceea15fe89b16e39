import csv
import json

import mpmath
import pytest

from witten_rigidity.cli import EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC, EXIT_OK, fmt, main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_theta(capsys):
    code, out, _ = run(capsys, "theta", "--kind", "theta1", "--tau", "i", "--v", "0")
    assert code == EXIT_OK
    assert out.startswith("theta1(v=0.0 + 0.0i, tau=0.0 + 1.0i) = 0.91357")
    assert "jacobi identity residual" in out


def test_theta_json(capsys):
    code, out, _ = run(capsys, "theta", "--kind", "theta", "--order", "1", "--format", "json", "--precision", "30")
    assert code == EXIT_OK
    payload = json.loads(out)
    # theta'(0, i) = 2 pi eta(i)^3 with eta(i) = Gamma(1/4) / (2 pi^(3/4))
    eta = mpmath.gamma(0.25) / (2 * mpmath.pi ** 0.75)
    assert payload["order"] == 1
    assert abs(mpmath.mpf(payload["value"].split()[0]) - 2 * mpmath.pi * eta ** 3) < 1e-14


def test_lefschetz_and_genus(capsys):
    code, out, _ = run(capsys, "lefschetz", "cp1_rigid")
    assert code == EXIT_OK and "total" in out
    code, out, _ = run(capsys, "genus", "cp1_rigid", "--format", "json")
    assert code == EXIT_OK


def test_anomaly_exit_codes(capsys):
    assert run(capsys, "check-anomaly", "cp1_rigid")[0] == EXIT_OK
    code, out, _ = run(capsys, "check-anomaly", "cp1_broken")
    assert code == EXIT_FAIL and "FAIL" in out


def test_periodicity(capsys):
    assert run(capsys, "check-periodicity", "isolated_synthetic", "--precision", "30")[0] == EXIT_OK
    assert run(capsys, "check-periodicity", "cp1_broken", "--shift", "2tau", "--precision", "30")[0] == EXIT_FAIL


def test_check_st(capsys):
    code, out, _ = run(capsys, "check-st", "cp1_rigid", "--precision", "30", "--t-sample", "0.11+0.07i,0.23+0.19i")
    assert code == EXIT_OK
    assert "observed constant" in out and "derived constant" in out


def test_scan_csv(capsys, tmp_path):
    target = tmp_path / "scan.csv"
    code, out, _ = run(capsys, "scan-rigidity", "cp1_rigid", "--format", "csv", "--out", str(target),
                       "--precision", "30")
    assert code == EXIT_OK
    rows = list(csv.reader(target.read_text().splitlines()))
    assert rows[0] == ["t_re", "t_im", "value_re", "value_im", "deviation"]
    assert len(rows) == 26
    assert out == target.read_text()


def test_scan_broken_fails(capsys):
    assert run(capsys, "scan-rigidity", "cp1_broken", "--grid", "2", "--precision", "30")[0] == EXIT_FAIL


def test_input_errors(capsys, tmp_path):
    code, _, err = run(capsys, "lefschetz", str(tmp_path / "nofile.json"))
    assert code == EXIT_INPUT and "input error" in err
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert run(capsys, "lefschetz", str(bad))[0] == EXIT_INPUT
    assert run(capsys, "theta", "--kind", "theta9")[0] == EXIT_INPUT
    assert run(capsys, "check-st", "cp1_rigid", "--relation", "S:1->3")[0] == EXIT_INPUT


def test_pole_exit_code(capsys):
    code, _, err = run(capsys, "lefschetz", "cp1_rigid", "--t", "0")
    assert code == EXIT_NUMERIC and "numerical error" in err


def test_version(capsys):
    assert main(["--version"]) == EXIT_OK


@pytest.mark.parametrize("z, text", [(1, "1.0"), (complex(1, -2), "1.0 - 2.0i")])
def test_fmt(z, text):
    assert fmt(z, 5) == text


def test_notes_in_json(capsys):
    code, out, _ = run(capsys, "lefschetz", "isolated_synthetic", "--convention", "printed", "--format", "json",
                       "--precision", "30")
    assert code == EXIT_OK and json.loads(out)["notes"] == []
    code, out, _ = run(capsys, "lefschetz", "odd_toy", "--format", "json", "--precision", "30")
    assert any("Q_j(E)" in n for n in json.loads(out)["notes"])
    code, out, _ = run(capsys, "genus", "cp1_rigid", "--format", "json")
    assert json.loads(out)["notes"] == ["integral over the whole manifold, dimension 2"]


@pytest.mark.parametrize("argv", [
    ("scan-rigidity", "cp1_rigid", "--grid", "3", "--format", "csv", "--precision", "30"),
    ("check-st", "odd_toy", "--precision", "30", "--format", "json"),
])
def test_output_is_deterministic(capsys, argv):
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second
