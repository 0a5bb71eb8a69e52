import json
import subprocess
import sys

import pytest

from fourier_dilation.cli import main


def _write(tmp_path, payload, name="in.json"):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return str(p)


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_cnd_z2(tmp_path, capsys):
    path = _write(tmp_path, {"cyclic": 2, "delta": 1})
    code, out, _ = _run(["check-cnd", "--input", path], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["passed"] and d["cocycle_dim"] == 1 and d["schema_version"] == 1
    assert abs(d["schoenberg"]["1.0"] - 0.6321205588285577) < 1e-12


def test_check_cnd_rejects_nonzero_identity(tmp_path, capsys):
    path = _write(tmp_path, {"group": {"kind": "cyclic", "n": 2}, "psi": {"kind": "table", "values": [1, 1]}})
    code, out, err = _run(["check-cnd", "--input", path], capsys)
    assert code == 1
    assert json.loads(out)["reason"] == "psi(identity) must be 0"


def test_check_cnd_hamming_dimension(tmp_path, capsys):
    path = _write(tmp_path, {"hypercube": 3, "hamming": True})
    code, out, _ = _run(["check-cnd", "--input", path], capsys)
    assert code == 0 and json.loads(out)["cocycle_dim"] == 3


def test_verify_zero_psi(tmp_path, capsys):
    path = _write(tmp_path, {"group": {"kind": "dihedral", "n": 3}, "psi": {"kind": "table", "values": [0] * 6}})
    out_file = tmp_path / "report.json"
    code, _, _ = _run(["verify", "--input", path, "--mc-samples", "0", "--samples", "3",
                       "--out", str(out_file)], capsys)
    assert code == 0
    d = json.loads(out_file.read_text())
    assert d["cocycle_dim"] == 0
    exact = [c for c in d["checks"] if c["kind"].startswith(("markov", "cocycle.cocycle", "cocycle.ortho",
                                                            "cocycle.homo", "cocycle.identity", "cocycle.psi",
                                                            "cocycle.gram", "crossed.pi_t"))]
    assert exact and all(c["residual"] == 0 for c in exact)
    # float diagnostics such as eigenvalues of the all-ones matrix only reach round-off
    assert d["max_residual"] < 1e-13


def test_verify_with_monte_carlo(tmp_path, capsys):
    path = _write(tmp_path, {"cyclic": 3, "delta": 1})
    code, out, _ = _run(["verify", "--input", path, "--times", "0,1/2,1", "--samples", "3",
                         "--mc-samples", "20000", "--horizon", "1"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["monte_carlo"]["passed"] and d["times"] == ["0", "1/2", "1"]
    assert any(c["kind"] == "reversed" for c in d["checks"])


@pytest.mark.parametrize("flag", ["--corrupt-pi", "--corrupt-psi"])
def test_verify_negative_controls(tmp_path, capsys, flag):
    path = _write(tmp_path, {"cyclic": 4, "delta": 1})
    code, out, err = _run(["verify", "--input", path, "--mc-samples", "0", "--samples", "3", flag, "1"], capsys)
    assert code == 1
    assert "FAIL" in err
    assert any(c["kind"].startswith("markov") and not c["passed"] for c in json.loads(out)["checks"])


def test_usage_errors(tmp_path, capsys):
    assert _run(["verify"], capsys)[0] == 2
    assert _run(["check-cnd", "--input", str(tmp_path / "missing.json")], capsys)[0] == 2
    bad = _write(tmp_path, {"table": [[0, 1], [1, 2]], "values": [0, 1]})
    assert _run(["check-cnd", "--input", bad], capsys)[0] == 2
    good = _write(tmp_path, {"cyclic": 2, "delta": 1}, "good.json")
    assert _run(["verify", "--input", good, "--times", "0,x"], capsys)[0] == 2
    assert _run(["explain", "--input", good, "--s", "1", "--u", "1", "--t", "1/2"], capsys)[0] == 2
    assert _run(["explain", "--input", good, "--s", "7", "--u", "0", "--t", "1"], capsys)[0] == 2
    assert _run(["check-cnd", "--input", _write(tmp_path, [1, 2], "list.json")], capsys)[0] == 2


def test_construction_error(tmp_path, capsys):
    # symmetric, psi(e) = 0, but not conditionally negative definite
    path = _write(tmp_path, {"cyclic": 3, "values": [0, -1, -1]})
    assert _run(["verify", "--input", path, "--mc-samples", "0"], capsys)[0] == 3


def test_explain_output(tmp_path, capsys):
    path = _write(tmp_path, {"cyclic": 2, "delta": 1})
    code, out, _ = _run(["explain", "--input", path, "--s", "1", "--u", "1/2", "--t", "1"], capsys)
    assert code == 0 and "0.6065306597" in out


def test_module_entry_point(tmp_path):
    path = _write(tmp_path, {"cyclic": 2, "delta": 1})
    proc = subprocess.run([sys.executable, "-m", "fourier_dilation", "check-cnd", "--input", path],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["passed"]
