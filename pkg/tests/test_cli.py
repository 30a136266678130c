import csv
import io
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from pdmse import cli

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *args):
    code = cli.main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def _rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_spectrum_row1(capsys):
    code, out, err = run(capsys, "spectrum", "--model", "t1r1", "--A", "5", "--B", "1", "--lambda", "1", "--nmax", "4")
    assert code == 0
    rows = _rows(out)
    assert rows[0][:3] == ["n", "E_closed", "E_shape"]
    assert [float(r[1]) for r in rows[1:]] == [0.0, 9.0, 16.0, 21.0, 24.0]
    meta = json.loads(err)
    assert meta["config"]["nmax"] == 4 and meta["pass"]


def test_spectrum_constraint_violation(capsys):
    code, _, err = run(capsys, "spectrum", "--model", "t1r2", "--A", "4", "--B", "20", "--lambda", "1")
    assert code == 2
    assert "B < A^2" in err


def test_spectrum_nlo_harmonic(capsys):
    code, out, _ = run(capsys, "spectrum", "--model", "nlo", "--alpha", "1", "--lambda", "0", "--nmax", "3")
    assert code == 0
    assert [float(r[1]) for r in _rows(out)[1:]] == [0.5, 1.5, 2.5, 3.5]


def test_unknown_model_and_flag(capsys):
    assert run(capsys, "spectrum", "--model", "t9r9")[0] == 2
    assert run(capsys, "spectrum", "--bogus")[0] == 2


def test_level_bound_exit(capsys):
    code, _, _ = run(capsys, "wavefunction", "--model", "t1r1", "--A", "5", "--B", "1", "--n", "7")
    assert code == 2


def test_wavefunction_output_and_sidecar(tmp_path, capsys):
    out = tmp_path / "psi.csv"
    code, stdout, _ = run(capsys, "wavefunction", "--model", "t1r1", "--A", "5", "--B", "1", "--n", "1",
                          "--output", str(out))
    assert code == 0 and stdout == ""
    rows = _rows(out.read_text())
    assert rows[0] == ["x", "psi_re", "psi_im", "psi_numeric_re", "psi_numeric_im"]
    meta = json.loads((tmp_path / "psi.csv.meta.json").read_text())
    assert "timestamp" in meta["header"]
    assert meta["metadata"]["overlap"] > 1 - 1e-6
    assert b"\r\n" not in out.read_bytes()


def test_config_merge(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"model": "t1r1", "A": 5, "B": 1, "lambda": 1, "nmax": 2}))
    code, out, err = run(capsys, "spectrum", "--config", str(cfg), "--nmax", "1")
    assert code == 0
    assert len(_rows(out)) == 3
    assert json.loads(err)["config"]["A"] == 5
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "spectrum", "--config", str(cfg))[0] == 2


def test_qes_golden(capsys):
    for name, args in (("qes_case3.csv", ["--case", "3"]), ("qes_case2a.csv", ["--case", "2a", "--b2", "2"])):
        code, out, _ = run(capsys, "qes", *args, "--format", "csv")
        assert code == 0
        got, ref = _rows(out), _rows((GOLDEN / name).read_text())
        assert [r[:5] for r in got] == [r[:5] for r in ref]
        assert all(float(r[5]) < 1e-12 for r in got[1:])


def test_qes_invalid(capsys):
    assert run(capsys, "qes", "--case", "2a", "--b2", "-1")[0] == 2


def test_poly_golden(capsys):
    code, out, err = run(capsys, "poly", "--nmax", "4", "--format", "csv")
    assert code == 0
    assert out == (GOLDEN / "poly_nmax4.csv").read_text()
    assert json.loads(err)["routes_agree"]
    assert run(capsys, "poly", "--n", "25")[0] == 2


def test_verify_single_suite_and_perturb(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "hermite", "--nmax", "12")
    assert code == 0 and json.loads(out)["pass"]
    code, out, _ = run(capsys, "verify", "--suite", "hermite", "--perturb", "1e-3")
    assert code == 3 and not json.loads(out)["pass"]


def test_sweep_deterministic_across_threads(tmp_path):
    outs = []
    for threads in ("1", "4"):
        path = tmp_path / f"s{threads}.csv"
        env = dict(os.environ, PDMSE_THREADS=threads)
        subprocess.run([sys.executable, "-m", "pdmse", "sweep", "--include-zero", "--output", str(path)],
                       env=env, check=True, capture_output=True)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    rows = _rows(outs[0].decode())
    assert rows[-1][0] == "0.0"


def test_spectrum_byte_identical(capsys):
    args = ("spectrum", "--model", "t1r5", "--A", "3", "--B", "1", "--lambda", "-1", "--format", "json")
    first = run(capsys, *args)[1]
    assert run(capsys, *args)[1] == first
