import csv
import json
import os

import numpy as np
import pytest

from sea2dof.cli import main

BASE = {
    "controller": {"type": "2dof", "rho": 3, "lambda": 10, "k": 2},
    "scenario": {
        "reference": {"kind": "step", "amplitude": 10},
        "duration": 2,
        "Ts": 0.001,
        "sigma_d": 0,
        "sigma_n": 0,
    },
}


def write_config(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def with_changes(**sections):
    data = json.loads(json.dumps(BASE))
    for key, val in sections.items():
        if isinstance(val, dict) and isinstance(data.get(key), dict):
            data[key].update(val)
        else:
            data[key] = val
    return data


def test_design_ok(tmp_path):
    out = tmp_path / "design.json"
    assert main(["design", "--config", write_config(tmp_path, BASE), "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["type"] == "explicit"
    assert payload["diagnostics"]["stable"] is True
    assert payload["diagnostics"]["bezout_residual"] < 1e-8
    for key in ("c1", "c2", "d_rho", "d_lambda_k", "p", "q", "rho", "lambda", "k"):
        assert key in payload


def test_design_invalid_weight(tmp_path, capsys):
    cfg = write_config(tmp_path, with_changes(controller={"rho": -1}))
    out = tmp_path / "design.json"
    assert main(["design", "--config", cfg, "--out", str(out)]) == 1
    assert not out.exists()
    assert "error" in capsys.readouterr().err


def test_design_not_coprime(tmp_path):
    # (s + 1) / (s (s + 1)) shares a factor
    cfg = write_config(tmp_path, with_changes(plant={"num": [1, 1], "den": [1, 1, 0]}))
    out = tmp_path / "design.json"
    assert main(["design", "--config", cfg, "--out", str(out)]) == 2
    assert not out.exists()


def test_unknown_config_key(tmp_path):
    cfg = write_config(tmp_path, with_changes(bogus=1))
    assert main(["design", "--config", cfg, "--out", str(tmp_path / "x.json")]) == 1


def test_missing_config_file(tmp_path):
    assert main(["design", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path / "x.json")]) == 1


def test_simulate_writes_trace_and_metrics(tmp_path):
    cfg = write_config(tmp_path, BASE)
    out = tmp_path / "trace.csv"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["t", "r", "F", "u", "d", "n", "e"]
    assert len(rows) == 2001
    metrics = json.loads((tmp_path / "trace.metrics.json").read_text())
    assert metrics["rise_time_s"] > 0
    assert abs(metrics["steady_state_n"] - 10) < 0.01


def test_simulate_byte_identical(tmp_path):
    cfg = write_config(tmp_path, with_changes(scenario={"sigma_d": 0.01, "sigma_n": 0.05}))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["simulate", "--config", cfg, "--out", str(a), "--seed", "9"]) == 0
    assert main(["simulate", "--config", cfg, "--out", str(b), "--seed", "9"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.metrics.json").read_bytes() == (tmp_path / "b.metrics.json").read_bytes()
    c = tmp_path / "c.csv"
    assert main(["simulate", "--config", cfg, "--out", str(c), "--seed", "10"]) == 0
    assert a.read_bytes() != c.read_bytes()


def test_simulate_zero_duration_writes_nothing(tmp_path):
    cfg = write_config(tmp_path, with_changes(scenario={"duration": 0}))
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "t.csv")]) == 1
    assert sorted(os.listdir(tmp_path)) == ["cfg.json"]


def test_simulate_explicit_metrics_path(tmp_path):
    cfg = write_config(tmp_path, BASE)
    m = tmp_path / "sub" / "m.json"
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "t.csv"), "--metrics", str(m)]) == 0
    assert m.exists()


def test_design_reload_gives_same_trace(tmp_path):
    cfg = write_config(tmp_path, BASE)
    design = tmp_path / "design.json"
    assert main(["design", "--config", cfg, "--out", str(design)]) == 0
    reloaded = with_changes()
    reloaded["controller"] = json.loads(design.read_text())
    cfg2 = write_config(tmp_path, reloaded, "cfg2.json")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["simulate", "--config", cfg, "--out", str(a)]) == 0
    assert main(["simulate", "--config", cfg2, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def read_index(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_sweep_rho(tmp_path):
    cfg = write_config(tmp_path, with_changes(grid={"rho": [6, 3, 1.5], "lambda": [10], "k": [2]}))
    out = tmp_path / "sweep"
    assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
    rows = read_index(out / "index.csv")
    assert list(rows[0]) == ["rho", "lambda", "k", "rise_time_s", "settling_time_s", "overshoot_pct", "control_energy"]
    assert [r["rho"] for r in rows] == ["6", "3", "1.5"]
    rise = [float(r["rise_time_s"]) for r in rows]
    assert rise[0] > rise[1] > rise[2]
    assert sorted(os.listdir(out)) == ["index.csv", "point_0000.json", "point_0001.json", "point_0002.json"]


def test_sweep_parallel_matches_serial(tmp_path):
    cfg = write_config(tmp_path, with_changes(grid={"rho": [3, 1.5], "lambda": [10], "k": [2]}))
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "s1")]) == 0
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path / "s2"), "--jobs", "2"]) == 0
    assert (tmp_path / "s1" / "index.csv").read_bytes() == (tmp_path / "s2" / "index.csv").read_bytes()


def test_sweep_empty_grid(tmp_path):
    cfg = write_config(tmp_path, with_changes(grid={"rho": [], "lambda": [10], "k": [2]}))
    out = tmp_path / "sweep"
    assert main(["sweep", "--config", cfg, "--out", str(out)]) == 1
    assert not out.exists()


def test_sweep_failed_point_marked(tmp_path):
    cfg = write_config(tmp_path, with_changes(grid={"rho": [3, 0], "lambda": [10], "k": [2]}))
    out = tmp_path / "sweep"
    assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
    rows = read_index(out / "index.csv")
    assert rows[0]["rise_time_s"] != "FAILED"
    assert rows[1]["rise_time_s"] == "FAILED"
    assert json.loads((out / "point_0001.json").read_text())["status"] == "failed"


def test_sweep_all_points_fail(tmp_path):
    cfg = write_config(tmp_path, with_changes(grid={"rho": [0], "lambda": [10], "k": [2]}))
    out = tmp_path / "sweep"
    assert main(["sweep", "--config", cfg, "--out", str(out)]) == 2
    assert not out.exists()


def read_freq(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    return data[:, 0], data[:, 1]


def test_freqresp_reference_transfer(tmp_path):
    cfg = write_config(tmp_path, BASE)
    out = tmp_path / "fr.csv"
    args = ["freqresp", "--config", cfg, "--out", str(out), "--w-min", "1e-3", "--w-max", "1e3", "--points", "61"]
    assert main(args + ["--transfer", "T_ref"]) == 0
    w, mag = read_freq(out)
    assert len(w) == 61
    assert w[0] == pytest.approx(1e-3) and w[-1] == pytest.approx(1e3)
    assert mag[0] == pytest.approx(1.0, abs=1e-4)


def test_freqresp_plant_integrator_slope(tmp_path):
    cfg = write_config(tmp_path, BASE)
    out = tmp_path / "fr.csv"
    args = ["freqresp", "--config", cfg, "--out", str(out), "--w-min", "1e-3", "--w-max", "1e-2", "--points", "5"]
    assert main(args + ["--transfer", "plant"]) == 0
    w, mag = read_freq(out)
    # below the motor poles |P| ~ K / (840 w)
    np.testing.assert_allclose(mag * w, 69788 * 0.02 * 460 / 3.5 / 840, rtol=1e-4)


def test_freqresp_needs_two_points(tmp_path):
    cfg = write_config(tmp_path, BASE)
    out = tmp_path / "fr.csv"
    assert main(["freqresp", "--config", cfg, "--out", str(out), "--points", "1"]) == 1
    assert not out.exists()


def test_shipped_configs_parse(tmp_path):
    root = os.path.join(os.path.dirname(__file__), os.pardir, "configs")
    for name in sorted(os.listdir(root)):
        out = tmp_path / (name + ".design.json")
        assert main(["design", "--config", os.path.join(root, name), "--out", str(out)]) == 0, name
