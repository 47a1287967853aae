import json
import math
from pathlib import Path

import numpy as np
import pytest

from nooncav.cli import main


def run_cli(args):
    return main([str(a) for a in args])


def read_data_lines(path: Path):
    """CSV lines with the volatile timestamp stripped."""
    return [
        line
        for line in path.read_text().splitlines()
        if not line.startswith("# generated")
    ]


def write_config(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "scenario.ini"
    path.write_text(text)
    return path


def test_design_run_writes_json(tmp_path):
    assert run_cli(["design-n2", "--out", tmp_path]) == 0
    doc = json.loads((tmp_path / "design_n2.json").read_text())
    minus = doc["branches"]["-1"]
    assert minus["delta2"] == pytest.approx(-0.20710678, abs=1e-8)
    assert minus["amplitudes"]["G,11"] == 0.0
    assert doc["meta"]["run"] == "design-n2"


def test_sweep_determinism(tmp_path):
    cfg = write_config(
        tmp_path,
        """
[grid]
delta2_min = -0.30
delta2_max = -0.10
points = 5
""",
    )
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run_cli(["sweep-delta2", "--config", cfg, "--out", out1, "--n-max", 3]) == 0
    assert run_cli(["sweep-delta2", "--config", cfg, "--out", out2, "--n-max", 3]) == 0
    lines1 = read_data_lines(out1 / "sweep_delta2.csv")
    lines2 = read_data_lines(out2 / "sweep_delta2.csv")
    assert lines1 == lines2
    header = [l for l in lines1 if not l.startswith("#")][0]
    assert header.split(",")[:3] == ["delta2", "concurrence", "trace_distance"]


def test_sweep_peak_value(tmp_path):
    cfg = write_config(
        tmp_path,
        """
[grid]
delta2_min = -0.2075
delta2_max = -0.2065
points = 3
""",
    )
    assert run_cli(["sweep-delta2", "--config", cfg, "--out", tmp_path, "--n-max", 3]) == 0
    rows = [
        l.split(",")
        for l in read_data_lines(tmp_path / "sweep_delta2.csv")
        if not l.startswith("#") and not l.startswith("delta2")
    ]
    best = max(float(r[1]) for r in rows)
    assert best > 0.99


def test_config_error_unknown_section(tmp_path):
    cfg = write_config(tmp_path, "[nonsense]\nx = 1\n")
    assert run_cli(["sweep-delta2", "--config", cfg, "--out", tmp_path]) == 2


def test_config_error_unknown_param(tmp_path):
    cfg = write_config(tmp_path, "[params]\njj = 2.0\n")
    assert run_cli(["sweep-delta2", "--config", cfg, "--out", tmp_path]) == 2


def test_config_error_empty_grid_writes_nothing(tmp_path):
    cfg = write_config(
        tmp_path,
        """
[grid]
delta2_min = -1.0
delta2_max = 2.0
points = 0
""",
    )
    out = tmp_path / "out"
    assert run_cli(["sweep-delta2", "--config", cfg, "--out", out]) == 2
    assert not out.exists()


def test_config_run_kind_mismatch(tmp_path):
    cfg = write_config(tmp_path, "[scenario]\nrun = pulse\n")
    assert run_cli(["sweep-delta2", "--config", cfg, "--out", tmp_path]) == 2


def test_numeric_failure_exit_code(tmp_path):
    cfg = write_config(tmp_path, "[params]\nj = 2.0\ndelta1 = 1.0\ndelta2 = -0.2\nkappa = 0.0\nrabi = 0.05\n")
    assert run_cli(["convergence", "--config", cfg, "--out", tmp_path]) == 2


def test_check_candidate_variant(tmp_path, capsys):
    assert run_cli(["check-candidate", "--out", tmp_path]) == 0
    captured = capsys.readouterr().out
    assert "candidate: false" in captured
    assert "blocking state" in captured
    assert "1 incoming path" in captured
    doc = json.loads((tmp_path / "candidate.json").read_text())
    assert doc["candidate"] is False
    assert doc["blocking_states"] == ["|G,13>"]


def test_check_candidate_standard_systems(tmp_path):
    cfg = write_config(
        tmp_path,
        """
[scenario]
system = n4
""",
    )
    assert run_cli(["check-candidate", "--config", cfg, "--out", tmp_path]) == 0
    doc = json.loads((tmp_path / "candidate.json").read_text())
    assert doc["candidate"] is True


def test_rate_run(tmp_path):
    assert run_cli(["rate", "--out", tmp_path]) == 0
    doc = json.loads((tmp_path / "rate.json").read_text())
    assert doc["rate_mhz"] == pytest.approx(3.7, abs=0.1)
    assert doc["scaling"]["2"] == pytest.approx(0.1**2 / 5.0)


def test_fig9_small_grid(tmp_path):
    cfg = write_config(
        tmp_path,
        """
[grid]
ratio_min = 1.9
ratio_max = 2.1
points = 3
""",
    )
    assert run_cli(["fig9", "--config", cfg, "--out", tmp_path]) == 0
    rows = [
        l.split(",")
        for l in read_data_lines(tmp_path / "fig9.csv")
        if not l.startswith("#") and not l.startswith("ratio")
    ]
    assert len(rows) == 3
    mid = rows[1]
    assert float(mid[0]) == pytest.approx(2.0)
    assert float(mid[1]) == pytest.approx(1.61, abs=0.02)


def test_coincidence_run(tmp_path):
    cfg = write_config(
        tmp_path,
        """
[coincidence]
windows = 0.05
""",
    )
    assert run_cli(["coincidence", "--config", cfg, "--out", tmp_path]) == 0
    doc = json.loads((tmp_path / "coincidence.json").read_text())
    rec = doc["records"][0]
    assert rec["regression"]["n11"] == pytest.approx(rec["analytic"]["n11"], rel=1e-3)
    assert rec["concurrence_from_counts"] > 0.9


def test_pulse_map_run(tmp_path):
    cfg = write_config(
        tmp_path,
        """
[grid]
power_min = 30
power_max = 60
power_points = 2
duration_min = 8.0
duration_max = 10.0
duration_points = 2
""",
    )
    assert run_cli(["pulse", "--config", cfg, "--out", tmp_path, "--n-max", 3]) == 0
    rows = [
        l
        for l in read_data_lines(tmp_path / "pulse_map.csv")
        if not l.startswith("#") and not l.startswith("power")
    ]
    assert len(rows) == 4


def test_convergence_run(tmp_path):
    cfg = write_config(
        tmp_path,
        """
[grid]
n_max_list = 3 4
""",
    )
    assert run_cli(["convergence", "--config", cfg, "--out", tmp_path]) == 0
    doc = json.loads((tmp_path / "convergence.json").read_text())
    assert doc["n_max"] == [3, 4]
    assert doc["passed"] is True


def test_concurrence_map_single_point_reports_tomography(tmp_path):
    cfg = write_config(
        tmp_path,
        """
[grid]
kappa_min = 0.1
kappa_max = 0.1
kappa_points = 1
rabi_min = 0.05
rabi_max = 0.05
rabi_points = 1
""",
    )
    assert run_cli(["concurrence-map", "--config", cfg, "--out", tmp_path, "--n-max", 3]) == 0
    doc = json.loads((tmp_path / "tomography.json").read_text())
    assert doc["concurrence"] == pytest.approx(0.995, abs=5e-3)
    assert doc["trace_distance"] == pytest.approx(0.0007, abs=2e-3)
    corner = doc["tomography"]["real"][0][2]
    assert corner == pytest.approx(-0.495, abs=0.01)
