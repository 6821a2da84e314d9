import csv
import io
import json
import os
import subprocess
import sys

import pytest

from defml.cli import main

REPORT_KEYS = {"identity", "params", "measured", "claimed_paper", "claimed_derived", "abs_dev", "pass"}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_coeffs_example_1(capsys):
    code, out, _ = run(capsys, "coeffs", "--family", "g", "--n", "5", "--h", "sym")
    assert code == 0
    doc = json.loads(out)
    rows = {(r["n"], r["y_power"]): r["coeff"] for r in doc["rows"]}
    assert rows[(3, 3)] == "4/3" and rows[(3, 1)] == "2/3*h^2"
    assert rows[(5, 5)] == "4/15" and rows[(5, 3)] == "4/3*h^2" and rows[(5, 1)] == "2/5*h^4"
    assert doc["provenance"]["oracle_agrees"] is True


def test_coeffs_example_2(capsys):
    code, out, _ = run(capsys, "coeffs", "--family", "phi-monic", "--n", "5", "--h", "1")
    assert code == 0
    rows = {(r["n"], r["y_power"]): r["coeff"] for r in json.loads(out)["rows"]}
    assert rows == {
        (0, 0): "1", (1, 1): "1", (2, 2): "1", (2, 0): "-1/2", (3, 3): "1", (3, 1): "-2",
        (4, 4): "1", (4, 2): "-5", (4, 0): "3/2", (5, 5): "1", (5, 3): "-10", (5, 1): "23/2",
    }


def test_coeffs_single_row(capsys):
    code, out, _ = run(capsys, "coeffs", "--n", "0")
    assert code == 0
    assert json.loads(out)["rows"] == [{"n": 0, "y_power": 0, "coeff": "1"}]


@pytest.mark.parametrize("h", ["0.5", "abc", "1/0"])
def test_coeffs_bad_h_is_usage_error(capsys, h):
    code, _, err = run(capsys, "coeffs", "--h", h)
    assert code == 2
    assert "invalid h literal" in err


def test_unknown_suite_exits_2(capsys):
    with pytest.raises(SystemExit) as e:
        main(["verify", "--suite", "nope"])
    assert e.value.code == 2


def test_zeros_phi_monic(capsys):
    code, out, _ = run(capsys, "zeros", "--family", "phi-monic", "--n", "3", "--h", "1")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert [r["re"] for r in rows] == pytest.approx([-1.4142135623730951, 0.0, 1.4142135623730951])
    code, out, _ = run(capsys, "zeros", "--family", "phi-monic", "--n", "1")
    assert [r["re"] for r in json.loads(out)["rows"]] == [0.0]


def test_zeros_g(capsys):
    code, out, _ = run(capsys, "zeros", "--family", "g", "--n", "3", "--h", "1")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert all(r["re"] == 0.0 for r in rows)
    assert [r["im"] for r in rows] == pytest.approx([-0.7071067811865476, 0.0, 0.7071067811865476])


def test_zeros_requires_positive_h(capsys):
    code, _, _ = run(capsys, "zeros", "--family", "g", "--n", "3", "--h", "-1")
    assert code == 2
    code, _, _ = run(capsys, "zeros", "--family", "phi", "--n", "3")
    assert code == 2


def test_quad(capsys):
    code, out, _ = run(capsys, "quad", "--n", "1", "--h", "1")
    nodes = [r for r in json.loads(out)["rows"] if r["record"] == "node"]
    assert code == 0 and nodes == [{"record": "node", "index": 0, "node": 0.0, "weight": 0.5}]
    code, out, _ = run(capsys, "quad", "--n", "2", "--h", "1", "--check-degree", "3")
    doc = json.loads(out)
    nodes = [r for r in doc["rows"] if r["record"] == "node"]
    assert [r["node"] for r in nodes] == pytest.approx([-0.7071067811865476, 0.7071067811865476])
    assert [r["weight"] for r in nodes] == pytest.approx([0.25, 0.25])
    assert code == 0 and doc["passed"]
    assert all(r["pass"] for r in doc["rows"] if r["record"] == "moment")


def test_quad_beyond_exactness_fails(capsys):
    code, out, _ = run(capsys, "quad", "--n", "2", "--h", "1", "--check-degree", "4")
    assert code == 1
    assert not json.loads(out)["passed"]


def test_verify_recurrences_schema(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "recurrences", "--n", "8")
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] is True
    for r in doc["rows"]:
        assert REPORT_KEYS <= set(r)
        assert {"n", "h"} <= set(r["params"])


def test_verify_orthogonality_h1(capsys):
    code, out, err = run(capsys, "verify", "--suite", "orthogonality", "--n", "6", "--h", "1")
    assert code == 0
    diag = [r for r in json.loads(out)["rows"] if r["identity"] == "phi-orthogonality-diagonal"]
    assert [r["measured"] for r in diag] == pytest.approx([2 / (n + 1) for n in range(7)], rel=1e-8)
    assert all(r["matched"] == "both" for r in diag)
    assert "printed constant (claimed_paper) matches" in err


def test_verify_orthogonality_h2_flags_printed_constant(capsys):
    code, out, err = run(capsys, "verify", "--suite", "orthogonality", "--n", "3", "--h", "2")
    assert code == 0
    diag = [r for r in json.loads(out)["rows"] if r["identity"] == "phi-orthogonality-diagonal"]
    assert all(r["matched"] == "derived" for r in diag)
    assert "printed constant (claimed_paper) MISMATCH" in err


def test_verify_float_h_only_for_numeric(capsys):
    code, _, _ = run(capsys, "verify", "--suite", "hyper", "--h", "0.5", "--n", "3")
    assert code == 2
    code, _, _ = run(capsys, "verify", "--suite", "hyper", "--h", "1/2,3", "--n", "4")
    assert code == 0


def test_determinism_and_csv_json_parity(capsys, tmp_path):
    argv = ["quad", "--n", "5", "--h", "3/2"]
    run(capsys, *argv, "--out", str(tmp_path / "a.json"))
    run(capsys, *argv, "--out", str(tmp_path / "b.json"))
    a = (tmp_path / "a.json").read_bytes()
    assert a == (tmp_path / "b.json").read_bytes()
    _, out, _ = run(capsys, *argv, "--format", "csv")
    doc = json.loads(a)
    table = list(csv.DictReader(io.StringIO(out)))
    assert len(table) == len(doc["rows"])
    for row, rec in zip(table, doc["rows"]):
        for k, v in rec.items():
            if isinstance(v, bool):
                assert row[k] == ("true" if v else "false")
            elif isinstance(v, float):
                assert float(row[k]) == v
            else:
                assert row[k] == str(v)


def test_numpy_backend_via_env(tmp_path):
    env = dict(os.environ, DEFML_NUMBA="0")
    cmd = [sys.executable, "-m", "defml", "verify", "--suite", "orthogonality", "--n", "4", "--h", "1"]
    res = subprocess.run(cmd, env=env, capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert json.loads(res.stdout)["provenance"]["backend"] == "numpy"
