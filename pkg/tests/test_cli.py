import json
import math
import os

import numpy as np
import pytest

from cwikel.cli import main
from cwikel.errors import ConfigError
from cwikel.experiments import ExperimentConfig, emit_plots, run, worker_count
from cwikel.fields import SampledFunction, box_function, torus_function


@pytest.fixture()
def grids(tmp_path):
    one = torus_function(1, 64, lambda x: np.ones_like(x))
    cosine = torus_function(1, 256, lambda x: 1 + np.cos(x))
    bump2 = torus_function(2, 32, lambda x, y: 4 * np.exp(-(x ** 2 + y ** 2)))
    u = torus_function(1, 256, lambda x: np.sin(3 * x) + 0.5 * np.cos(7 * x))
    box = box_function(1, 4.0, 2048,
                       lambda x: np.exp(-(np.abs(x) - 1.5) ** 2) + 0.3 * (np.abs(x) < 0.7))
    paths = {}
    for name, f in (("one", one), ("cos", cosine), ("bump2", bump2),
                    ("u", u), ("box", box)):
        p = tmp_path / f"{name}.grid"
        f.save(p)
        paths[name] = str(p)
    return tmp_path, paths


def test_grid_roundtrip(tmp_path):
    f = torus_function(2, 16, lambda x, y: np.sin(x) * np.cos(y))
    p = tmp_path / "f.grid"
    f.save(p)
    g = SampledFunction.load(p)
    assert g.dim == 2 and g.resolution == 16 and g.measure == "normalized"
    assert np.array_equal(g.values, f.values)
    b = box_function(1, 3.0, 32, lambda x: x ** 2)
    p2 = tmp_path / "b.grid"
    b.save(p2)
    g2 = SampledFunction.load(p2)
    assert g2.measure == "lebesgue" and g2.half_width == 3.0
    assert np.array_equal(g2.values, b.values)


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(kind="nonsense")


def test_spectrum_anchor_through_runner(grids):
    tmp_path, paths = grids
    cfg = ExperimentConfig(kind="spectrum", inputs={"f": paths["one"]},
                           params={"N": 2, "p": 1.0}, out_dir=str(tmp_path))
    report = run(cfg)
    header, rows = report.tables["quasinorm"]
    assert rows[0][1] == pytest.approx(math.sqrt(5), abs=1e-12)


def test_cli_spectrum_and_exit_code(grids, capsys):
    tmp_path, paths = grids
    rc = main(["spectrum", "--f", paths["one"], "--N", "2",
               "--out-dir", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "experiment=spectrum" in out


def test_cli_cover_writes_json_and_checks(grids):
    tmp_path, paths = grids
    cov_path = tmp_path / "cov.json"
    rc = main(["cover", "--input", paths["cos"], "--n", "4",
               "--out", str(cov_path), "--out-dir", str(tmp_path)])
    assert rc == 0
    payload = json.loads(cov_path.read_text())
    assert payload["cubes"]
    assert {"center", "side", "j_value", "family"} <= set(payload["cubes"][0])
    checks = (tmp_path / "cover_checks.csv").read_text()
    assert "pass" in checks and "FAIL" not in checks


def test_cli_approx(grids):
    tmp_path, paths = grids
    report_path = tmp_path / "err.csv"
    rc = main(["approx", "--input", paths["cos"], "--u", paths["u"], "--n", "8",
               "--report", str(report_path), "--out-dir", str(tmp_path)])
    assert rc == 0
    lines = report_path.read_text().strip().splitlines()
    assert lines[0] == "n,rank_bound,error,normalized"
    assert len(lines) == 2


def test_cli_bs_count(grids):
    tmp_path, paths = grids
    rc = main(["bs-count", "--f", paths["bump2"], "--t", "0.5", "--N", "4",
               "--out-dir", str(tmp_path)])
    assert rc == 0
    rows = (tmp_path / "bs-count_bs.csv").read_text().strip().splitlines()
    _, _, c1, c2 = rows[1].split(",")
    assert c1 == c2


def test_cli_equivalence(grids):
    tmp_path, paths = grids
    eq_path = tmp_path / "eq.json"
    rc = main(["equivalence", "--f", paths["box"], "--out", str(eq_path),
               "--out-dir", str(tmp_path)])
    assert rc == 0
    payload = json.loads(eq_path.read_text())
    assert payload["ratio"] > 0
    assert payload["appendix"]["interior_bound"]["holds"]


def test_cli_counterexample_and_growth_csv(grids):
    tmp_path, paths = grids
    out_csv = tmp_path / "growth.csv"
    rc = main(["counterexample", "--d", "1", "--ns", "2,4", "--N", "32",
               "--resolution", "4096", "--out", str(out_csv),
               "--out-dir", str(tmp_path)])
    assert rc == 0
    lines = out_csv.read_text().strip().splitlines()
    assert lines[0] == "n,q_n,fit,residual"
    assert len(lines) == 3


def test_cli_rearrange_roundtrip(grids):
    tmp_path, paths = grids
    out_csv = tmp_path / "mu.csv"
    rc = main(["rearrange", "--input", paths["cos"], "--out", str(out_csv),
               "--out-dir", str(tmp_path)])
    assert rc == 0
    lines = out_csv.read_text().strip().splitlines()
    assert lines[0] == "t_left,t_right,value"
    vals = [float(line.split(",")[2]) for line in lines[1:]]
    assert vals == sorted(vals, reverse=True)


def test_reports_are_deterministic(grids):
    tmp_path, paths = grids
    cfg = dict(kind="sweep", inputs={"f": paths["cos"]},
               params={"Ns": [4, 8, 16]}, seed=3)
    r1 = run(ExperimentConfig(**cfg, out_dir=str(tmp_path / "a")))
    r2 = run(ExperimentConfig(**cfg, out_dir=str(tmp_path / "b")))
    p1 = r1.write_tables(tmp_path / "a")
    p2 = r2.write_tables(tmp_path / "b")
    for a, b in zip(p1, p2):
        assert a.read_bytes() == b.read_bytes()
    assert r1.digest == r2.digest


def test_report_subcommand_runs_config_file(grids):
    tmp_path, paths = grids
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({
        "kind": "sweep", "inputs": {"f": paths["cos"]},
        "params": {"Ns": [4, 8]}, "seed": 0, "out_dir": str(tmp_path / "rep")}))
    rc = main(["report", "--config", str(cfg_path), "--plots"])
    assert rc == 0
    assert (tmp_path / "rep" / "sweep_sweep.csv").exists()
    assert (tmp_path / "rep" / "sweep_sweep.svg").exists()


def test_emit_plots_growth_and_empty(grids, capsys):
    tmp_path, paths = grids
    from cwikel.experiments import Report
    rep = Report(experiment="counterexample", digest="x",
                 tables={"growth": (("n", "q_n", "fit", "residual"),
                                    [(2, 1.0, 0.99, 0.01), (4, 1.2, 1.21, -0.01)]),
                         "sweep": (("f_id", "N", "ratio"), [])},
                 checks=[], wall_clock=0.0)
    written = emit_plots(rep, tmp_path / "plots")
    assert len(written) == 1
    assert written[0].name == "counterexample_growth.svg"
    assert "empty" in capsys.readouterr().out


def test_failed_check_gives_nonzero_exit(grids, monkeypatch, tmp_path):
    from cwikel import experiments

    def fake_runner(cfg):
        return {"t": (("a",), [(1,)])}, [experiments.Check("always fails", 1.0, 0.0, 0.0, False)]

    monkeypatch.setitem(experiments._RUNNERS, "rearrange", fake_runner)
    rc = main(["rearrange", "--input", str(tmp_path / "missing.grid"),
               "--out-dir", str(tmp_path)])
    assert rc == 1


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("CWIKEL_THREADS", "4")
    assert worker_count() == 4
    monkeypatch.setenv("CWIKEL_THREADS", "bogus")
    assert worker_count() == 1
    monkeypatch.delenv("CWIKEL_THREADS")
    assert worker_count() == 1


def test_missing_input_is_clean_error(tmp_path, capsys):
    rc = main(["spectrum", "--f", str(tmp_path / "nope.grid"), "--N", "2",
               "--out-dir", str(tmp_path)])
    assert rc == 2
    assert "error:" in capsys.readouterr().err
