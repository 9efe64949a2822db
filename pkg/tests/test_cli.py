import json
import os
import subprocess
import sys
from importlib import resources

import jsonschema
import numpy as np
import pytest

from stekloff.blockop.model import builtin_model, make_model, model_to_dict, neumann_frequencies
from stekloff.cli import main

SCHEMA = json.loads(resources.files("stekloff").joinpath("schemas/model_verify.schema.json").read_text())


def run(tmp_path, *args):
    code = main([*args, "--out", str(tmp_path)])
    return code


def read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    return header, [dict(zip(header, line.split(","))) for line in lines[1:]]


def test_ball_spectrum(tmp_path):
    assert run(tmp_path, "ball-spectrum", "--omega", "1.0", "--n-max", "5") == 0
    header, rows = read_csv(tmp_path / "ball_spectrum.csv")
    assert header == ["family", "degree", "omega", "lambda", "multiplicity", "residual"]
    assert len(rows) == 10
    lams = [float(r["lambda"]) for r in rows]
    assert lams == sorted(lams)
    tm1 = next(r for r in rows if r["family"] == "TM" and r["degree"] == "1")
    assert float(tm1["lambda"]) == pytest.approx(-0.5574077246549022, rel=1e-12)


def test_seventeen_digits(tmp_path):
    run(tmp_path, "ball-spectrum", "--n-max", "1")
    _, rows = read_csv(tmp_path / "ball_spectrum.csv")
    assert rows[0]["lambda"] == format(float(rows[0]["lambda"]), ".17g")
    assert len(rows[0]["lambda"].lstrip("-0.").rstrip("0")) >= 16


def test_usage_errors(tmp_path):
    assert run(tmp_path, "ball-spectrum", "--n-max", "0") == 64
    assert main([]) == 64
    assert main(["ball-spectrum", "--bogus"]) == 64
    assert run(tmp_path, "model-verify", "--format", "csv") == 64


def test_pole_exit_code(tmp_path, capsys):
    assert run(tmp_path, "ball-spectrum", "--omega", "4.493409457909064", "--n-max", "3") == 2
    assert "TE n=1" in capsys.readouterr().err


def test_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["ball-spectrum", "--n-max", "2", "--out", str(blocker / "sub")]) == 1
    assert main(["ball-spectrum", "--config", str(tmp_path / "missing.cfg")]) == 1


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("command = ball-spectrum\nn_max = 3\nomega = 0.5\n")
    assert run(tmp_path, "ball-spectrum", "--config", str(cfg), "--n-max", "2") == 0
    _, rows = read_csv(tmp_path / "ball_spectrum.csv")
    assert len(rows) == 4 and all(r["omega"] == "0.5" for r in rows)
    cfg.write_text("command = ball-spectrum\nunknown = 1\n")
    assert run(tmp_path, "ball-spectrum", "--config", str(cfg)) == 64


def test_env_out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("STEKLOFF_OUT_DIR", str(tmp_path / "env"))
    assert main(["ball-spectrum", "--n-max", "2"]) == 0
    assert (tmp_path / "env" / "ball_spectrum.csv").exists()


def test_json_format(tmp_path):
    assert run(tmp_path, "ball-spectrum", "--n-max", "2", "--format", "json") == 0
    rows = json.loads((tmp_path / "ball_spectrum.json").read_text())
    assert len(rows) == 4 and set(rows[0]) == {"family", "degree", "omega", "lambda", "multiplicity", "residual"}


def test_tau_curves_golden(tmp_path):
    assert run(tmp_path, "tau-curves", "--model", "golden", "--window=-0.45,0.45", "--grid", "21") == 0
    header, rows = read_csv(tmp_path / "tau_curves.csv")
    assert header == ["side", "branch", "lambda", "tau"]
    lam = np.array([float(r["lambda"]) for r in rows])
    tau = np.array([float(r["tau"]) for r in rows])
    assert np.allclose(tau, -(1 - lam) / (2 - lam), atol=1e-12)
    header, fixed = read_csv(tmp_path / "tau_fixed_points.csv")
    assert header == ["side", "branch", "lambda_star"] and fixed == []
    assert run(tmp_path, "tau-curves", "--model", "golden", "--window=-0.9,0.45") == 0
    _, fixed = read_csv(tmp_path / "tau_fixed_points.csv")
    assert [float(r["lambda_star"]) for r in fixed] == pytest.approx([-0.6180339887498949])


def test_tau_curves_degenerate_and_validity(tmp_path):
    assert run(tmp_path, "tau-curves", "--model", "degenerate") == 0
    assert read_csv(tmp_path / "tau_fixed_points.csv")[1] == []
    assert run(tmp_path, "tau-curves", "--model", "golden", "--window=-1.5,0.2") == 2


def test_tau_curves_v_side(tmp_path):
    assert run(tmp_path, "tau-curves", "--model", "golden", "--side", "V") == 0
    _, fixed = read_csv(tmp_path / "tau_fixed_points.csv")
    assert sorted(float(r["lambda_star"]) for r in fixed) == pytest.approx([-0.6180339887498949, 1.618033988749895])
    _, curve = read_csv(tmp_path / "tau_curves.csv")
    assert min(float(r["lambda"]) for r in curve) == 0.0


def test_modified(tmp_path):
    assert run(tmp_path, "modified", "--problem", "ScalarLB", "--n-max", "9", "--basis", "8") == 0
    header, rows = read_csv(tmp_path / "modified.csv")
    assert header == ["problem", "degree", "basis_size", "lambda"]
    for r in rows:
        assert float(r["lambda"]) == pytest.approx(-1 / (int(r["degree"]) + 1), abs=1e-10)
    assert {r["basis_size"] for r in rows} == {"4", "8"}


def test_modified_sprojection_positive(tmp_path):
    assert run(tmp_path, "modified", "--problem", "SProjection", "--n-max", "20", "--basis", "16") == 0
    _, rows = read_csv(tmp_path / "modified.csv")
    assert len(rows) == 60 and all(float(r["lambda"]) > 0 for r in rows)


def test_modified_mu_only_for_scalar(tmp_path):
    assert run(tmp_path, "modified", "--problem", "SProjection", "--mu", "2") == 2


def test_model_verify_seeds(tmp_path):
    assert run(tmp_path, "model-verify", "--dims", "8,6,2", "--seeds", "0,1") == 0
    for s in (0, 1):
        rep = json.loads((tmp_path / f"model_verify_seed{s}.json").read_text())
        jsonschema.validate(rep, SCHEMA)
        assert rep["model"]["seed"] == s and rep["model"]["dims"] == [8, 6, 2]


def test_model_verify_jobs_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["model-verify", "--dims", "6,5,2", "--seeds", "0:3", "--out", str(a)]) == 0
    assert main(["model-verify", "--dims", "6,5,2", "--seeds", "0:3", "--jobs", "2", "--out", str(b)]) == 0
    for s in range(3):
        name = f"model_verify_seed{s}.json"
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_model_verify_no_neumann(tmp_path, capsys):
    w = float(neumann_frequencies(make_model((8, 6, 2), seed=0))[0])
    assert run(tmp_path, "model-verify", "--dims", "8,6,2", "--seeds", "0", "--omega", repr(w)) == 0
    rep = json.loads((tmp_path / "model_verify_seed0.json").read_text())
    assert not rep["audits"]["NoNeumann"]["passed"]
    assert "NoNeumann" in capsys.readouterr().out


def test_model_verify_invariant_violation(tmp_path, capsys):
    d = model_to_dict(builtin_model("golden"))
    d["A_tr"] = [[1.0, 1.0], [1.0, -2.0]]
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(d))
    assert run(tmp_path, "model-verify", "--model", str(p)) == 4
    assert "A_tr PSD" in capsys.readouterr().err


def test_model_verify_disagreement_exit_code(tmp_path, monkeypatch):
    import stekloff.blockop.verify as verify

    real = verify.compare_spectra
    monkeypatch.setattr(verify, "compare_spectra", lambda ref, cand: {**real(ref, cand), "passed": False})
    assert run(tmp_path, "model-verify", "--model", "golden") == 3


def test_console_script_module(tmp_path):
    out = subprocess.run([sys.executable, "-m", "stekloff", "ball-spectrum", "--n-max", "1", "--out", str(tmp_path)],
                         capture_output=True, text=True)
    assert out.returncode == 0 and (tmp_path / "ball_spectrum.csv").exists()


@pytest.mark.parametrize(
    "args",
    [
        ["ball-spectrum", "--n-max", "7", "--omega", "1.3"],
        ["modified", "--n-max", "4", "--basis", "8"],
        ["tau-curves", "--dims", "6,5,2", "--seeds", "3", "--grid", "50"],
        ["model-verify", "--dims", "6,5,2", "--seeds", "4"],
    ],
)
def test_byte_determinism(tmp_path, args):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main([*args, "--out", str(a)]) == 0
    assert main([*args, "--out", str(b)]) == 0
    names = sorted(os.listdir(a))
    assert names == sorted(os.listdir(b)) and names
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()
