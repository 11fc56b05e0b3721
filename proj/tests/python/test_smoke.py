import json
import os
from pathlib import Path

import numpy as np
import pytest

import svarwb

DATA = Path(__file__).resolve().parents[1] / "data"


def write_config(path, body):
    path.write_text(json.dumps(body))
    return path


def recursive_config(tmp_path):
    zeros = [(1, 2), (1, 3), (2, 3)]
    return {
        "schema_version": 1,
        "model": {"variables": 3, "regimes": 1, "lags": 1},
        "restrictions": {
            "equalities": [
                {"type": "zero", "cell": {"kind": "ir", "horizon": 0, "variable": v, "shock": k}}
                for v, k in zeros
            ]
        },
        "simulate": {
            "T": 400,
            "burn_in": 50,
            "regimes": [
                {
                    "intercept": [0.1, -0.2, 0.0],
                    "lags": [[[0.5, 0.1, 0.0], [0.0, 0.4, 0.1], [0.1, 0.0, 0.3]]],
                    "sigma": [[1.0, 0.3, 0.2], [0.3, 1.0, 0.1], [0.2, 0.1, 1.0]],
                }
            ],
        },
        "data": {"path": "sim/data.csv", "date_column": "t"},
        "seed": 3,
        "output": str(tmp_path / "run"),
    }


def test_version_matches_package():
    assert svarwb.version() == svarwb.__version__
    assert svarwb.__version__.count(".") == 2


def test_identify_recursive_fixture(tmp_path):
    report = svarwb.run("identify", DATA / "trivariate_identify.json", out=tmp_path / "id")
    assert report["outcome"].startswith("identified (recursive route)")
    assert "identify.csv" in report["artifacts"]
    assert (tmp_path / "id" / "report.json").exists()


def test_simulate_then_estimate(tmp_path):
    cfg = write_config(tmp_path / "model.json", recursive_config(tmp_path))
    sim = svarwb.run("simulate", cfg, out=tmp_path / "sim")
    assert "data.csv" in sim["artifacts"]
    est = svarwb.run("estimate", cfg, threads=1)
    assert est["details"]["solutions"] >= 1
    assert (Path(est["output"]) / "solutions.csv").exists()


def test_ols_fit_recovers_covariance():
    rng = np.random.default_rng(0)
    y = rng.standard_normal((5000, 2)) @ np.array([[1.0, 0.0], [0.5, 2.0]]).T
    fit = svarwb.ols_fit(y, lags=1, break_rows=[2501])
    assert len(fit) == 2
    for regime in fit:
        assert regime["sigma"].shape == (2, 2)
        assert np.allclose(regime["sigma"], [[1.0, 0.5], [0.5, 4.25]], atol=0.25)
        assert np.abs(regime["lags"][0]).max() < 0.1


def test_bad_index_raises_config_error(tmp_path):
    with pytest.raises(svarwb.SvarwbError) as info:
        svarwb.run("identify", DATA / "bad_index.json", out=tmp_path / "bad")
    assert info.value.code == "IndexOutOfRange" or info.value.code == "ConfigError"
    assert info.value.exit_code == 2


def test_unknown_command_rejected(tmp_path):
    with pytest.raises(ValueError):
        svarwb.run("fit", DATA / "trivariate_identify.json", out=tmp_path / "x")


def test_environment_threads(tmp_path, monkeypatch):
    monkeypatch.setenv("SVARWB_THREADS", "2")
    cfg = write_config(tmp_path / "model.json", recursive_config(tmp_path))
    svarwb.run("simulate", cfg, out=tmp_path / "sim")
    report = json.loads((tmp_path / "sim" / "report.json").read_text())
    assert report["threads"] == 2
