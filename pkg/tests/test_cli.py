import json
import subprocess
import sys

import numpy as np
import pytest

from psflab.cli import replay, run


def _json_out(capsys):
    return json.loads(capsys.readouterr().out.strip().splitlines()[-1])


def test_classify(capsys, tmp_path):
    code = run(["classify", "--p", "2", "--q", "2", "--alpha", "1", "--beta", "1", "--abs",
                "--two-sided", "--out-dir", str(tmp_path)])
    assert code == 0
    out = _json_out(capsys)
    assert out["psf"]["tag"] == "ConditionalEquality"
    assert out["psf"]["gamma"] == "1/1"
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "classify" and manifest["exit_code"] == 0
    assert "phi0" in manifest["kernel"]


def test_classify_inadmissible_note(capsys, tmp_path):
    assert run(["classify", "--p", "2", "--q", "2", "--alpha", "1/2", "--beta", "1",
                "--out-dir", str(tmp_path)]) == 0
    out = _json_out(capsys)
    assert out["psf"]["tag"] == "Inadmissible"
    assert "out of theorem scope" in out["note"]


@pytest.mark.parametrize("argv", [
    ["classify", "--p", "2"],
    ["classify", "--p", "1/2", "--q", "2", "--alpha", "1", "--beta", "1"],
    ["nonsense"],
    ["psf-run", "--family", "gaussian", "--point", "2,2,3/4,3/4", "--N", "4"],
])
def test_usage_errors_exit_2(argv, tmp_path, capsys):
    assert run(argv + ["--out-dir", str(tmp_path)] if argv[0] != "nonsense" else argv) == 2
    assert not (tmp_path / "manifest.json").exists()


def test_psf_run_and_replay(tmp_path):
    first = tmp_path / "a"
    argv = ["psf-run", "--family", "gaussian", "--point", "2,2,1,1", "--N", "4,8,16",
            "--out-dir", str(first)]
    assert run(argv) == 0
    text = (first / "series.csv").read_text()
    lines = text.splitlines()
    assert lines[0].startswith("N,M,P_N_f,P_M_fhat,defect")
    assert len(lines) == 4
    second = tmp_path / "b"
    assert replay(str(first / "manifest.json"), str(second)) == 0
    assert (second / "series.csv").read_text() == text


def test_stepfn_and_norms(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"c": [1.0, 0.5, 0.25], "delta": [1.0, 2.0, 3.0]}))
    assert run(["stepfn", "--spec", str(spec), "--emit", "Fhat", "--range=-2:2:5",
                str(tmp_path / "fhat.csv"), "--out-dir", str(tmp_path)]) == 0
    rows = (tmp_path / "fhat.csv").read_text().splitlines()
    assert len(rows) == 6
    assert run(["norms", "--spec", str(spec), "--alpha", "1", "--p", "2", "--beta", "1",
                "--q", "2", "--out-dir", str(tmp_path)]) == 0
    out = _json_out(capsys)
    assert out["F"]["value"] > 0 and out["bound1"] > 0


def test_family_and_signs(tmp_path, capsys):
    assert run(["family", "--name", "mainth3", "--point", "2,2,1,1", "--N", "32",
                "--out-dir", str(tmp_path)]) == 0
    spec = json.loads((tmp_path / "spec.json").read_text())
    assert len(spec["c"]) == 33 and spec["params"]["A"] == "2"
    coeffs = tmp_path / "c.txt"
    np.savetxt(coeffs, np.linspace(1, 0.5, 12))
    assert run(["signs", "--coeffs", str(coeffs), "--q", "4", "--trials", "8",
                "--out-dir", str(tmp_path)]) == 0
    res = json.loads((tmp_path / "signs.json").read_text())
    assert len(res["signs"]) == 12 and res["ratio"] > 0


def test_weights_check(tmp_path, capsys):
    assert run(["weights-check", "--u", "pow:2", "--v", "pow:2", "--deltaB", "1", "--p", "2",
                "--q", "2", "--N-list", "16,32,64,128", "--out-dir", str(tmp_path)]) == 0
    out = _json_out(capsys)
    assert out["verdict"] == "LikelyBounded"
    rows = (tmp_path / "check.csv").read_text().splitlines()
    assert rows[0] == "condition,N,value" and len(rows) == 17


def test_bump_dump(tmp_path):
    assert run(["bump", "--dump", "bump.csv", "--x-max", "4", "--samples", "9",
                "--out-dir", str(tmp_path)]) == 0
    lines = (tmp_path / "bump.csv").read_text().splitlines()
    assert lines[0].startswith("# kernel ")
    assert json.loads(lines[0][len("# kernel "):])["grid_step"] > 0


def test_same_seed_same_bytes(tmp_path):
    coeffs = tmp_path / "c.txt"
    np.savetxt(coeffs, np.ones(10))
    outs = []
    for name in ("x", "y"):
        d = tmp_path / name
        assert run(["signs", "--coeffs", str(coeffs), "--q", "3", "--trials", "4", "--seed", "9",
                    "--out-dir", str(d)]) == 0
        outs.append((d / "signs.json").read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "psflab", "classify", "--p", "inf", "--q", "inf",
                          "--alpha", "2", "--beta", "2", "--out-dir", str(tmp_path)],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["psf"]["tag"] == "Holds"
