import json

import pytest

from kppspread import ConfigError, constant_profile, cosine_profile
from kppspread.cli import (convergence_study, main, run_scenario,
                           validate_config)
from kppspread.media import medium_from_dict
from kppspread.presets import list_presets, preset_config


def tiny_homogeneous_config():
    return {
        "scenario": "tiny",
        "medium": {"profile": {"kind": "constant", "m": 1.0},
                   "phase": {"kind": "affine", "L": 1.0}},
        "solver": {"X_max": 120.0, "n_cells": 600, "dt": 0.04, "t_end": 40.0},
        "tracker": {"level": 0.5, "window": 10.0, "transient": 0.3},
        "theory": {"w_infinity": True, "wL": [], "bounds": True},
        "expect": {"w_low_in": [1.7, 2.1], "w_up_in": [1.7, 2.1]},
    }


def test_list_presets_contains_required_names():
    names = list_presets()
    for required in ("homogeneous", "example1-log-power", "example2-power",
                     "example3-x-over-log", "twovalue-K", "convergence-wL"):
        assert required in names


def test_presets_validate_and_build_media():
    for name in list_presets():
        cfg = preset_config(name)
        normalized = validate_config(cfg)
        x_max = (normalized["solver"] or {}).get("X_max", 1000.0)
        medium_from_dict(normalized["medium"], x_max)
        # round-trips through JSON
        assert json.loads(json.dumps(cfg)) == cfg


def test_validate_config_field_messages():
    cfg = tiny_homogeneous_config()
    del cfg["medium"]
    with pytest.raises(ConfigError, match="medium"):
        validate_config(cfg)
    cfg = tiny_homogeneous_config()
    cfg["solver"]["n_cells"] = 10.5
    with pytest.raises(ConfigError, match="n_cells"):
        validate_config(cfg)
    cfg = tiny_homogeneous_config()
    cfg["tracker"]["level"] = 1.5
    with pytest.raises(ConfigError, match="tracker.level"):
        validate_config(cfg)


def test_run_scenario_artifacts_and_determinism(tmp_path):
    cfg = tiny_homogeneous_config()
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    rep1 = run_scenario(cfg, out1)
    rep2 = run_scenario(cfg, out2)
    for out in (out1, out2):
        for fname in ("report.json", "trace.csv", "residuals.csv", "plot.svg"):
            assert (out / fname).exists(), fname
    assert (out1 / "report.json").read_bytes() == (out2 / "report.json").read_bytes()
    assert rep1.passed and rep2.passed
    assert rep1.regime == "homogeneous"
    assert rep1.theory["homogeneous"] is True
    assert rep1.theory["w_infinity"] == pytest.approx(2.0)
    assert {c["name"] for c in rep1.checks} >= {"ordering", "w_low_in", "w_up_in"}
    # reproducibility: the report embeds the fully resolved config and
    # round-trips losslessly through JSON
    stored = json.loads((out1 / "report.json").read_text())
    assert stored["config"]["solver"] == cfg["solver"]
    assert stored["config"]["tracker"]["window"] == 10.0
    from kppspread.report import load_report
    assert load_report(out1 / "report.json") == rep1


def test_run_scenario_residual_diagnostics(tmp_path):
    cfg = {
        "scenario": "resid",
        "medium": {"profile": {"kind": "cosine", "m": 2.0, "amp": 1.0},
                   "phase": {"kind": "power", "alpha": 0.5}},
        "solver": None,
        "theory": {"w_infinity": True, "wL": [], "bounds": True},
    }
    rep = run_scenario(cfg, tmp_path)
    assert rep.regime == "unique"
    assert rep.residuals["x"]
    body = (tmp_path / "residuals.csv").read_text().splitlines()
    assert body[0] == "x,r,log_growth"
    assert len(body) > 10


def test_run_scenario_convergence_rows(tmp_path):
    cfg = preset_config("convergence-wL")
    cfg["theory"]["wL"] = [5.0, 20.0]          # trimmed for test speed
    rep = run_scenario(cfg, tmp_path, check=True)
    assert (tmp_path / "wL.csv").exists()
    assert (tmp_path / "wL.svg").exists()
    assert len(rep.eigen_rows) == 2
    assert rep.eigen_rows[0][2] > rep.eigen_rows[1][2]
    assert rep.passed


def test_convergence_study_constant_profile():
    rows, w_ref = convergence_study(constant_profile(1.0), [5.0, 20.0])
    assert w_ref == pytest.approx(2.0)
    for _, _, gap in rows:
        assert gap <= 1e-6


def test_convergence_study_requires_increasing():
    with pytest.raises(ConfigError):
        convergence_study(cosine_profile(2.0, 1.0), [20.0, 5.0])


# ---------------------------------------------------------------------------
# command-line entry points and exit codes
# ---------------------------------------------------------------------------

def test_cli_preset_list_and_emit(tmp_path, capsys):
    assert main(["preset", "--list"]) == 0
    out = capsys.readouterr().out
    assert "homogeneous" in out and "twovalue-K8" in out
    target = tmp_path / "cfg.json"
    assert main(["preset", "homogeneous", "--emit", "--out", str(target)]) == 0
    cfg = json.loads(target.read_text())
    assert cfg["scenario"] == "homogeneous"
    assert main(["preset", "no-such-preset", "--emit"]) == 2


def test_cli_run_single_and_exit_codes(tmp_path, capsys):
    cfg = tiny_homogeneous_config()
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    assert main(["run", str(path), "--out", str(out), "--check"]) == 0
    assert (out / "report.json").exists()

    # malformed config: exit 2
    bad = tmp_path / "bad.json"
    bad.write_text("{\"scenario\": \"x\"}")
    assert main(["run", str(bad), "--out", str(tmp_path / "o2")]) == 2

    # numerically impossible tracker demand: exit 3
    broken = tiny_homogeneous_config()
    broken["solver"]["t_end"] = 5.0            # shorter than two windows
    p3 = tmp_path / "short.json"
    p3.write_text(json.dumps(broken))
    assert main(["run", str(p3), "--out", str(tmp_path / "o3")]) == 3

    # failing expectation under --check: exit 4
    failing = tiny_homogeneous_config()
    failing["expect"] = {"w_up_min": 5.0}
    p4 = tmp_path / "fail.json"
    p4.write_text(json.dumps(failing))
    assert main(["run", str(p4), "--out", str(tmp_path / "o4"), "--check"]) == 4
    assert main(["run", str(p4), "--out", str(tmp_path / "o5")]) == 0


def test_cli_run_batch_parallel(tmp_path):
    a = tiny_homogeneous_config()
    b = tiny_homogeneous_config()
    b["scenario"] = "tiny2"
    batch = tmp_path / "batch.json"
    batch.write_text(json.dumps({"scenarios": [a, b]}))
    out = tmp_path / "batch_out"
    assert main(["run", str(batch), "--out", str(out), "--jobs", "2"]) == 0
    assert (out / "tiny" / "report.json").exists()
    assert (out / "tiny2" / "report.json").exists()


def test_cli_wl_command(tmp_path, capsys):
    prof = tmp_path / "prof.json"
    prof.write_text(json.dumps({"kind": "constant", "m": 1.0}))
    out = tmp_path / "wl"
    assert main(["wL", str(prof), "--L", "5,20", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "w_infinity = 2" in text
    rows = (out / "wL.csv").read_text().splitlines()
    assert rows[0] == "L,w_L,w_infinity,gap"
    assert len(rows) == 3
