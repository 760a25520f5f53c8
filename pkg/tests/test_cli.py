"""Command-line interface tests (click runner, tiny point counts)."""

import csv
import json
import math
from pathlib import Path

import pytest
from click.testing import CliRunner

from qstatevol.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def test_volume_outputs_and_rerun_identical(runner, tmp_path):
    args = ["--out-dir", str(tmp_path), "volume", "--metric", "sd",
            "--points", "20000", "--checkpoint-every", "10000", "--seed", "7"]
    res = runner.invoke(main, args)
    assert res.exit_code == 0, res.output
    csv_path = tmp_path / "volume_sd_faure-tezuka_7.csv"
    json_path = tmp_path / "volume_sd_faure-tezuka_7.json"
    assert csv_path.exists() and json_path.exists()
    with open(csv_path) as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["points", "estimate_total", "estimate_sep",
                             "estimate_nonsep", "prob_sep"]
    assert [r["points"] for r in rows] == ["10000", "20000"]
    for r in rows:
        tot = float(r["estimate_total"])
        assert tot == float(r["estimate_sep"]) + float(r["estimate_nonsep"])
        assert 0 < float(r["prob_sep"]) < 1
    rep = read_json(json_path)
    assert rep["final"]["V_total"] == pytest.approx(float(rows[-1]["estimate_total"]))
    assert rep["targets"]["V_total"]["value"] == pytest.approx(math.pi ** 8 / 5040)
    # byte-identical rerun
    first = csv_path.read_bytes()
    assert runner.invoke(main, args).exit_code == 0
    assert csv_path.read_bytes() == first


def test_volume_multiple_metrics(runner, tmp_path):
    res = runner.invoke(main, ["--out-dir", str(tmp_path), "volume",
                               "--metric", "sd", "--metric", "km",
                               "--points", "10000"])
    assert res.exit_code == 0, res.output
    assert (tmp_path / "volume_km_faure-tezuka_1.csv").exists()


def test_boundary_rank3_unsupported_metric_structured_error(runner, tmp_path):
    res = runner.invoke(main, ["--out-dir", str(tmp_path), "boundary",
                               "--metric", "km", "--surface", "rank3",
                               "--points", "1000"])
    assert res.exit_code == 2
    err = read_json(tmp_path / "boundary_error_rank3_1.json")
    assert err["error"] == "unsupported-metric"
    assert err["metrics"] == ["km"]


def test_boundary_rank3_csv_shape(runner, tmp_path):
    res = runner.invoke(main, ["--out-dir", str(tmp_path), "boundary",
                               "--metric", "sd", "--surface", "rank3",
                               "--points", "5000", "--checkpoint-every", "5000"])
    assert res.exit_code == 0, res.output
    with open(tmp_path / "boundary_rank3_sd_faure-tezuka_1.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["points", "B_total", "B_sep", "beta"]
    assert rows[0]["beta"] == ""          # rank-3 rows leave beta empty
    assert float(rows[0]["B_sep"]) > 0


def test_boundary_rank4_csv_shape(runner, tmp_path):
    res = runner.invoke(main, ["--out-dir", str(tmp_path), "boundary",
                               "--metric", "sd", "--surface", "rank4_sep",
                               "--points", "5000", "--checkpoint-every", "5000"])
    assert res.exit_code == 0, res.output
    with open(tmp_path / "boundary_rank4_sep_sd_faure-tezuka_1.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert rows[0]["B_sep"] == ""         # rank-4 rows leave B_sep empty
    assert float(rows[0]["beta"]) > 0


def test_sweep(runner, tmp_path):
    res = runner.invoke(main, ["--out-dir", str(tmp_path), "sweep",
                               "--a", "1.0", "--a", "0.1",
                               "--points", "10000"])
    assert res.exit_code == 0, res.output
    files = list(Path(tmp_path).glob("sweep*"))
    assert files, "sweep should write an output file"


def test_mc(runner, tmp_path):
    res = runner.invoke(main, ["--out-dir", str(tmp_path), "mc",
                               "--metric", "maximal", "--replications", "3",
                               "--points", "5000"])
    assert res.exit_code == 0, res.output
    files = list(Path(tmp_path).glob("mc*"))
    assert files, "mc should write an output file"


def test_conjectures_dump(runner, tmp_path):
    res = runner.invoke(main, ["--out-dir", str(tmp_path), "conjectures"])
    assert res.exit_code == 0, res.output
    payload = read_json(tmp_path / "conjectures.json")
    km = [e for e in payload["entries"]
          if e["metric"] == "km" and e["quantity"] == "V_total"]
    assert km[0]["symbolic"] == "4/315*pi^8"
    assert km[0]["value"] == pytest.approx(120.489, rel=1e-5)
    assert payload["hall_constant_N2"] == pytest.approx(2 / math.pi)
    assert any(e["superseded"] for e in payload["entries"])


def test_out_dir_env_var(runner, tmp_path, monkeypatch):
    monkeypatch.setenv("QSTATEVOL_OUT", str(tmp_path))
    res = runner.invoke(main, ["conjectures"])
    assert res.exit_code == 0, res.output
    assert (tmp_path / "conjectures.json").exists()


def test_curvature_small(runner, tmp_path):
    res = runner.invoke(main, ["--out-dir", str(tmp_path), "curvature",
                               "--min-trials", "500", "--refinement", "30"])
    assert res.exit_code == 0, res.output
    rep = read_json(tmp_path / "curvature.json")
    assert rep["levy_gromov"]["verdict"] == "violated"
    assert rep["ricci_trace"]["N2"] == pytest.approx(18.0)
    assert math.isfinite(rep["ricci_min"]["N3"])
