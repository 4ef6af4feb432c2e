"""CLI orchestration: config validation, outputs, determinism, checkpointing."""

import json
import os

import numpy as np
import pytest

from grwasim.cli import ConfigError, ScenarioConfig, load_config, main


def run_cli(args):
    return main(args)


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError):
        ScenarioConfig({"omege": 1.0})
    with pytest.raises(ConfigError):
        ScenarioConfig({"grid": {"resolutiom": 4}})
    with pytest.raises(ConfigError):
        ScenarioConfig({"bell_sign": "x"})
    with pytest.raises(ConfigError):
        ScenarioConfig({"measures": ["nope"]})


def test_times_range_and_list():
    cfg = ScenarioConfig({"times": {"start": 1.0, "stop": 2.0, "step": 0.5}})
    np.testing.assert_allclose(cfg.times(), [1.0, 1.5, 2.0])
    cfg2 = ScenarioConfig({"times": {"list": [0.0, 3.0, 9.0]}})
    np.testing.assert_allclose(cfg2.times(), [0.0, 3.0, 9.0])
    with pytest.raises(ConfigError):
        ScenarioConfig({"times": {"list": [3.0, 1.0]}}).times()


def test_truncation_override(tmp_path):
    cfg = ScenarioConfig({"alpha_re": 0.5, "lambda": 0.1,
                          "truncation": {"n_override": 12}})
    coeffs = cfg.coefficients()
    assert coeffs.truncation_n == 12


def test_toml_and_overrides(tmp_path):
    toml = tmp_path / "scenario.toml"
    toml.write_text('omega = 1.0\ndelta = 0.5\nlambda = 0.2\nalpha_re = 2.0\n'
                    '[times]\nlist = [0.0, 1.0]\n')
    cfg = load_config(str(toml), {"lambda": 0.3, "grid_resolution": 64})
    assert cfg.params.lam == 0.3
    assert cfg.params.delta == 0.5
    assert cfg.grid_resolution == 64
    assert cfg.digest() != load_config(str(toml), {}).digest()


def test_spectrum_ground_row(tmp_path):
    out = tmp_path / "o"
    assert run_cli(["spectrum", "--lambda", "0.5", "--delta", "0.0",
                    "--alpha", "1.0", "--out", str(out)]) == 0
    lines = (out / "spectrum.csv").read_text().strip().split("\n")
    header = lines[0].split(",")
    assert header[:3] == ["n", "energy_plus", "energy_minus"]
    ground = lines[1].split(",")
    assert ground[0] == "0"
    assert float(ground[1]) == pytest.approx(-0.25)  # -x/4 at delta = 0, x = 1
    head = json.loads((out / "spectrum.json").read_text())
    assert {"config_digest", "version", "truncation"} <= set(head)


def test_evolve_and_determinism(tmp_path):
    a1, a2 = tmp_path / "a1", tmp_path / "a2"
    args = ["evolve", "--lambda", "0.1", "--delta", "1.0", "--alpha", "0.5",
            "--times", "0", "14.4", "28.8"]
    assert run_cli(args + ["--out", str(a1)]) == 0
    assert run_cli(args + ["--out", str(a2)]) == 0
    assert (a1 / "evolve.csv").read_bytes() == (a2 / "evolve.csv").read_bytes()
    rows = (a1 / "evolve.csv").read_text().strip().split("\n")
    assert rows[0] == "t,varrho,re_xi,im_xi,sigma_z,entropy"
    last = rows[-1].split(",")
    assert float(last[5]) == pytest.approx(0.15690, abs=5e-4)


def test_grid_outputs(tmp_path):
    out = tmp_path / "g"
    assert run_cli(["husimi", "--lambda", "0.1", "--alpha", "0.5", "--times", "0",
                    "--grid-res", "32", "--out", str(out)]) == 0
    head = json.loads((out / "husimi_t0.json").read_text())
    assert head["kind"] == "husimi" and head["resolution"] == 32
    body = (out / "husimi_t0.csv").read_text().strip().split("\n")
    assert body[0] == "re_beta,im_beta,value"
    assert len(body) == 1 + 32 * 32


def test_polar_output(tmp_path):
    out = tmp_path / "p"
    assert run_cli(["polar", "--lambda", "0.3", "--delta", "1.0", "--alpha", "4.0",
                    "--times", "77", "--out", str(out)]) == 0
    head = json.loads((out / "polar_t77.json").read_text())
    assert head["peak_count"] == 1
    assert head["peak_theta_deg"] == pytest.approx(355.49, abs=0.5)
    assert head["integral"] == pytest.approx(1.0, abs=1e-4)


def test_scan_with_checkpoint_resume(tmp_path):
    out = tmp_path / "s"
    args = ["scan", "--lambda", "0.1", "--alpha", "0.5",
            "--times", "0", "5", "10", "15", "--measure", "sigma_z",
            "--out", str(out)]
    assert run_cli(args) == 0
    clean = (out / "scan.csv").read_text()
    assert not (out / "scan.partial.csv").exists()

    # simulate an interrupted run: pre-seed a partial file with a poisoned row
    cfg = load_config(None, {"lambda": 0.1, "alpha": complex(0.5), "times": [0.0, 5.0, 10.0, 15.0],
                             "measures": ["sigma_z"], "output_dir": str(out)})
    with open(out / "scan.partial.csv", "w") as fh:
        fh.write("t,sigma_z\n5.0,123.0\n")
    with open(out / "scan.progress.json", "w") as fh:
        json.dump({"config_digest": cfg.digest(), "measures": ["sigma_z"]}, fh)
    assert run_cli(args) == 0
    resumed = (out / "scan.csv").read_text()
    assert "123.0" in resumed
    assert resumed != clean

    # digest mismatch: checkpoint ignored, clean result reproduced
    with open(out / "scan.partial.csv", "w") as fh:
        fh.write("t,sigma_z\n5.0,123.0\n")
    with open(out / "scan.progress.json", "w") as fh:
        json.dump({"config_digest": "stale", "measures": ["sigma_z"]}, fh)
    assert run_cli(args) == 0
    assert (out / "scan.csv").read_text() == clean


def test_lambda_sweep(tmp_path):
    out = tmp_path / "sweep"
    toml = tmp_path / "c.toml"
    toml.write_text('delta = 0.5\nalpha_re = 2.0\nlambda_values = [0.01, 0.05]\n'
                    'measures = ["mandel"]\n'
                    f'output_dir = "{out}"\n'
                    '[times]\nstart = 0.0\nstop = 800.0\nstep = 4.0\n')
    assert run_cli(["scan", "--config", str(toml)]) == 0
    rows = (out / "sweep.csv").read_text().strip().split("\n")
    assert rows[0] == "lambda,avg_mandel"
    assert len(rows) == 3


def test_error_json_on_bad_config(tmp_path, capsys):
    toml = tmp_path / "bad.toml"
    toml.write_text("omeg = 2.0\n")
    code = run_cli(["spectrum", "--config", str(toml), "--out", str(tmp_path)])
    assert code != 0
    err = json.loads(capsys.readouterr().err.strip())
    assert "error" in err


def test_kitten_requires_series_stop(tmp_path, capsys):
    code = run_cli(["kitten", "--lambda", "0.01", "--delta", "0.8",
                    "--alpha", "2.5", "--out", str(tmp_path)])
    assert code != 0
    assert "error" in json.loads(capsys.readouterr().err.strip())


@pytest.mark.slow
def test_kitten_command_end_to_end(tmp_path):
    toml = tmp_path / "kitten.toml"
    out = tmp_path / "k"
    toml.write_text('omega = 1.0\ndelta = 0.8\nlambda = 0.01\nalpha_re = 2.5\n'
                    'fractions = [2, 3]\nthreads = 2\n'
                    f'output_dir = "{out}"\n'
                    '[series]\nstop = 6.6e6\nstep = 2000.0\nresolution = 128\n')
    assert run_cli(["kitten", "--config", str(toml)]) == 0
    payload = json.loads((out / "kitten.json").read_text())
    assert abs(payload["t_long"] - 2.9568e6) / 2.9568e6 < 0.02
    assert abs(payload["t_long_scaling"] - 0.02956) / 0.02956 < 0.05
    rows = {s["fraction_q"]: s for s in payload["schedule"]}
    assert rows[2]["min"]["peaks"] == 2 and rows[2]["max"]["peaks"] == 4
    assert rows[3]["min"]["peaks"] == 3 and rows[3]["max"]["peaks"] == 6
    assert (out / "kitten.csv").exists() and (out / "kitten_series.csv").exists()
    # sidecars cleaned after success
    assert not (out / "kitten_series.partial.csv").exists()


def test_oracle_check_passes(tmp_path):
    out = tmp_path / "oc"
    assert run_cli(["oracle-check", "--lambda", "0.1", "--delta", "0.5",
                    "--alpha", "1.0", "--times", "0", "7", "31", "--out", str(out)]) == 0
    report = json.loads((out / "oracle_check.json").read_text())
    assert all(c["pass"] for c in report["checks"])
    names = {c["name"] for c in report["checks"]}
    assert {"trace", "entropy_equality", "photon_moments", "husimi_vs_fock",
            "wigner_closed_vs_series", "sigma_z_grwa_vs_exact"} <= names
