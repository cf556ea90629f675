import json

import pytest

from randperiods.cli import main
from randperiods.tables import read_csv

CONFIG = {
    "version": 1,
    "manifold": {"kind": "torus", "dim": 2},
    "window": {"a": 1.0, "D": 6.0},
    "h": [0.1],
    "submanifold": {"kind": "torus_line", "direction": [1, 0], "closed": True},
    "samples": 2000,
    "seed": 7,
}


@pytest.fixture
def config_path(tmp_path):
    p = tmp_path / "torus.json"
    p.write_text(json.dumps(CONFIG))
    return p


def test_moments_command(config_path, tmp_path):
    out = tmp_path / "out"
    code = main(["moments", "--config", str(config_path), "--samples", "5000", "--seed", "7", "--out", str(out)])
    assert code == 0
    header, rows = read_csv(out / "moments.csv")
    assert header == ["h", "p", "exact", "mc_mean", "mc_stderr", "z"]
    assert len(rows) == 3
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["reports"]["moments"]["path"] == "moments.csv"
    assert manifest["seed"] == 7 and manifest["config"]["samples"] == 5000
    assert manifest["end"] is not None


def test_sweep_command(tmp_path):
    out = tmp_path / "s"
    code = main(["sweep", "--h", "1/20", "1/40", "1/80", "1/160", "1/320", "--out", str(out)])
    assert code == 0
    _, rows = read_csv(out / "sweep.csv")
    fit = [r for r in rows if r[0] == "fit"][0]
    assert abs(fit[6] - 0.5) <= 0.1


def test_failed_sweep_exit_code(tmp_path):
    # pre-asymptotic h range: slope ~0.26, outside 0.5 +- 0.15
    assert main(["sweep", "--h", "1/2", "1/3", "1/4", "1/5", "1/6", "--out", str(tmp_path / "p")]) == 2


def test_vanishing_weight_exit_code(config_path, tmp_path):
    # with D = 0.5 the window (20.5, 21] holds no mode of nonzero period on gamma
    code = main(["sweep", "--config", str(config_path), "--h", "1/20", "1/20.5", "1/21", "1/22",
                 "--D", "0.5", "--out", str(tmp_path / "f")])
    assert code == 2


def test_usage_errors(capsys, tmp_path):
    assert main(["bogus"]) == 1
    assert "usage" in capsys.readouterr().err
    assert main(["moments", "--samples", "ten"]) == 1


def test_config_error_exit(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({**CONFIG, "sampels": 5}))
    assert main(["moments", "--config", str(p), "--out", str(tmp_path / "o")]) == 1


def test_empty_cluster_exit(tmp_path, capsys):
    assert main(["modes", "--h", "0.5", "--D", "0.1", "--out", str(tmp_path / "o")]) == 1
    assert "(2, 2.1]" in capsys.readouterr().err


def test_out_dir_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("RANDPERIODS_OUT", str(tmp_path / "env"))
    assert main(["modes"]) == 0
    assert (tmp_path / "env" / "modes.csv").exists()


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
