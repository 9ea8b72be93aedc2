import csv
import json
import math

import numpy as np
import pytest

from dirac_nodal import AsymptoticNodalModel, DiracProblem, example1_problem, synthesize_nodal_data
from dirac_nodal import cli
from dirac_nodal import io as dio
from dirac_nodal.cli import ConfigError, RunConfig, main, validate_config

PI = math.pi
SQRT3 = math.sqrt(3.0)


@pytest.fixture
def zero_spec(tmp_path):
    path = tmp_path / "zero.json"
    path.write_text(json.dumps(DiracProblem().to_dict()))
    return path


@pytest.fixture
def ex1_spec(tmp_path):
    path = tmp_path / "ex1.json"
    path.write_text(json.dumps(example1_problem().to_dict()))
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# -- serialization -----------------------------------------------------------------------


def test_nodal_csv_round_trip_is_exact(tmp_path):
    data = synthesize_nodal_data(AsymptoticNodalModel.from_problem(example1_problem()), 40, 60)
    path = tmp_path / "nodes.csv"
    path.write_text(dio.nodal_csv(data))
    back = dio.read_nodal_csv(path)
    for n, s in data.sets.items():
        assert np.array_equal(back.sets[n].points, s.points)


def test_json_floats_exact_and_nan_null():
    x = [0.1 + 0.2, PI, 1e-300, float("nan")]
    back = json.loads(dio.dumps_json({"x": x, "v": np.float64(2.5), "k": np.int64(3)}))
    assert back["x"][:3] == x[:3] and back["x"][3] is None
    assert back["v"] == 2.5 and back["k"] == 3


def test_fmt_seventeen_digits():
    assert float(dio.fmt(0.1 + 0.2)) == 0.1 + 0.2
    assert dio.fmt(1 / 3) == "0.33333333333333331"


def test_read_nodal_csv_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        dio.read_nodal_csv(bad)
    bad.write_text("n,j,x\n3,0,oops\n")
    with pytest.raises(ValueError):
        dio.read_nodal_csv(bad)


# -- configuration -----------------------------------------------------------------------------


def test_minimal_config_defaults(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"command": "demo-example1"}))
    cfg = validate_config(path)
    assert cfg.grid_size == 257 and cfg.n_max == 200 and cfg.m is None


def test_config_n_order(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"command": "demo-example1", "n_min": 50, "n_max": 40}))
    with pytest.raises(ConfigError) as exc:
        validate_config(path)
    assert set(exc.value.fields) == {"n_min", "n_max"}
    assert "n_min" in str(exc.value) and "n_max" in str(exc.value)


def test_config_missing_problem():
    with pytest.raises(ConfigError) as exc:
        cli.check_config(RunConfig(command="forward"))
    assert exc.value.fields == ["problem_path"]


@pytest.mark.parametrize(
    "raw, field",
    [
        ({"command": "fly"}, "command"),
        ({"command": "demo-example1", "grid_size": 5}, "grid_size"),
        ({"command": "demo-example1", "n_max": 2.5}, "n_max"),
        ({"command": "demo-example1", "m": "x"}, "m"),
        ({"command": "invert", "data_path": "/nonexistent.csv"}, "data_path"),
        ({"command": "demo-example1", "colour": 1}, "colour"),
    ],
)
def test_config_rejects(tmp_path, raw, field):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(raw))
    with pytest.raises(ConfigError) as exc:
        validate_config(path)
    assert field in exc.value.fields


# -- commands ---------------------------------------------------------------------------------


def test_forward_zero(zero_spec, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["forward", "--problem", str(zero_spec), "--n-min", "1", "--n-max", "5", "--out", str(out)]) == 0
    rows = read_csv(out / "spectrum.csv")
    assert [int(r["n"]) for r in rows] == [1, 2, 3, 4, 5]
    for r in rows:
        assert float(r["lambda"]) == pytest.approx(int(r["n"]), abs=1e-9)
    status = json.loads(capsys.readouterr().out)
    assert status["status"] == "ok"


def test_roundtrip_zero(zero_spec, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["roundtrip", "--problem", str(zero_spec), "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    for key in ("alpha_error", "beta_error", "V_sup_error", "Fpi_error", "G0_error", "F0_error", "Gpi_error"):
        assert report[key] <= 1e-6, key
    assert report["gauge_satisfied"] and report["source"] == "numeric"


def test_roundtrip_asymptotic_example(ex1_spec, tmp_path, capsys):
    out = tmp_path / "out"
    argv = ["roundtrip", "--problem", str(ex1_spec), "--use-asymptotic", "--n-min", "1000", "--n-max", "2000"]
    assert main(argv + ["--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["source"] == "asymptotic"
    assert report["alpha_error"] <= 1e-6 and report["V_sup_error"] <= 1e-3


def test_demo_example(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["demo-example1", "--m", "1.7320508", "--n-max", "400", "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "Gpi" in printed and "sup error" in printed
    report = json.loads((out / "example1_report.json").read_text())
    rows = {r["quantity"]: r for r in report["rows"]}
    expected = {"alpha": PI / 6, "beta": PI / 3, "Fpi": 2 * PI, "G0": 0.0, "F0": 0.0, "Gpi": (SQRT3 + 1) * PI / 2}
    for k, v in expected.items():
        # m is given to 8 digits, so F0 and Gpi inherit a ~1e-8 offset
        assert rows[k]["from_psi"] == pytest.approx(v, abs=1e-7), k
        assert rows[k]["reference"] == pytest.approx(v, abs=1e-15)
    assert report["V_sup_error"]["from_psi"] <= 1e-8


def test_synth_then_invert(ex1_spec, tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["synth", "--problem", str(ex1_spec), "--n-min", "500", "--n-max", "1000", "--out", str(a)]) == 0
    assert main(["invert", "--data", str(a / "nodes.csv"), "--m", str(SQRT3), "--out", str(b)]) == 0
    res = json.loads((b / "reconstruction.json").read_text())
    assert res["alpha"] == pytest.approx(PI / 6, abs=1e-6)
    assert res["gauge"] == "omega_pi=0"
    assert len(res["V"]) == 257
    assert read_csv(b / "diagnostics.csv")[0].keys() >= {"x", "psi1", "psi2_plus", "psi2_minus"}


def test_config_file_run(ex1_spec, tmp_path, capsys):
    out = tmp_path / "out"
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"command": "nodes", "problem_path": str(ex1_spec), "n_min": 20, "n_max": 24}))
    assert main(["nodes", "--config", str(cfg), "--out", str(out)]) == 0
    rows = read_csv(out / "nodes.csv")
    assert len(rows) == sum(range(20, 25))


def test_commands_idempotent(ex1_spec, tmp_path, capsys):
    outs = [tmp_path / "r1", tmp_path / "r2"]
    for out in outs:
        assert main(["synth", "--problem", str(ex1_spec), "--n-min", "40", "--n-max", "80", "--out", str(out)]) == 0
        assert main(["invert", "--data", str(out / "nodes.csv"), "--out", str(out)]) == 0
        assert main(["forward", "--problem", str(ex1_spec), "--n-min", "20", "--n-max", "25", "--out", str(out)]) == 0
    names = sorted(p.name for p in outs[0].iterdir())
    assert names == sorted(p.name for p in outs[1].iterdir())
    for name in names:
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes(), name


def test_error_leaves_no_files(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("n,j,x\n50,0,0.1\n")  # too few n to estimate anything
    out = tmp_path / "out"
    assert main(["invert", "--data", str(bad), "--out", str(out)]) == 1
    err = json.loads(capsys.readouterr().out)
    assert err["status"] == "error" and err["command"] == "invert"
    assert not out.exists() or not any(out.iterdir())


def test_write_failure_leaves_no_partial_files(tmp_path, monkeypatch, capsys):
    def broken(cfg):
        return {"a.csv": "ok\n", "b.csv": None}, {}

    monkeypatch.setitem(cli.HANDLERS, "demo-example1", broken)
    out = tmp_path / "out"
    assert cli.run(RunConfig(command="demo-example1", output_dir=str(out))) == 1
    assert list(out.iterdir()) == []


def test_config_error_reported(capsys, tmp_path):
    assert main(["forward", "--out", str(tmp_path / "o")]) == 1
    err = json.loads(capsys.readouterr().out)
    assert err["fields"] == ["problem_path"]
