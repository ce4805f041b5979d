import json
from pathlib import Path

import numpy as np
import pytest

from sshladder import ChainSpec
from sshladder.cli import main
from sshladder.config import ConfigError, config_hash, parse_config, preset_names, preset_text, validate_config
from sshladder.io import fmt, read_csv

GOLDEN = Path(__file__).parent / "golden"
GOLDEN_PRESETS = ("fig3_spectrum", "fig4_eigensweep", "bands_topological")


def run_preset(name, out_dir, monkeypatch, capsys):
    monkeypatch.setenv("SSHLADDER_OUTPUT_DIR", str(out_dir))
    assert main(["run", name]) == 0
    return json.loads(capsys.readouterr().out)


def write_config(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def base_spectrum():
    return {
        "kind": "spectrum",
        "spec": {"n_cells": 3, "j_intra_khz": 400, "j_inter_khz": 400},
        "probe_site": 2,
        "fwhm_khz": 65,
    }


@pytest.mark.parametrize("name", preset_names())
def test_presets_validate(name, tmp_path):
    path = tmp_path / name
    path.write_text(preset_text(name))
    assert validate_config(path) == []


def test_preset_listing(capsys):
    assert main(["presets", "list"]) == 0
    names = capsys.readouterr().out.split()
    assert "fig3_spectrum.json" in names and "fig6_chiral_sweep.json" in names
    assert main(["presets", "dump", "fig3_spectrum"]) == 0
    assert json.loads(capsys.readouterr().out)["kind"] == "spectrum"
    assert main(["presets", "dump", "nope"]) == 2


def test_onsite_length_diagnostic(tmp_path):
    cfg = base_spectrum()
    cfg["spec"]["onsite_khz"] = [0, 0, 0, 0, 0]
    problems = validate_config(write_config(tmp_path, cfg))
    assert any("onsite_khz: expected 6 entries" in p for p in problems)


def test_dt_zero_diagnostic(tmp_path):
    cfg = {"kind": "quench", "spec": {"n_cells": 3, "j_intra_khz": 1, "j_inter_khz": 1}, "dt_us": 0}
    assert any(p.startswith("dt_us") for p in validate_config(write_config(tmp_path, cfg)))


def test_all_problems_listed(tmp_path):
    cfg = base_spectrum()
    cfg["spec"]["onsite_khz"] = [0]
    cfg["fwhm_khz"] = -3
    cfg["colour"] = "blue"
    problems = validate_config(write_config(tmp_path, cfg))
    fields = {p.split(":")[0] for p in problems}
    assert {"spec.onsite_khz", "fwhm_khz", "colour"} <= fields


def test_unknown_spec_key(tmp_path):
    cfg = base_spectrum()
    cfg["spec"]["j3_khz"] = 1
    assert validate_config(write_config(tmp_path, cfg)) == ["spec.j3_khz: unknown key"]


def test_malformed_and_missing(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert "malformed JSON" in validate_config(bad)[0]
    assert "cannot read" in validate_config(tmp_path / "missing.json")[0]


def test_ratio_grids_positive():
    cfg = {"kind": "eigensweep", "ratio_grid": [0.5, -1]}
    with pytest.raises(ConfigError, match="ratio_grid"):
        parse_config(cfg)
    cfg = {"kind": "eigensweep", "ratio_grid": {"start": 0.1, "stop": 5, "num": 60}}
    grid = parse_config(cfg)["ratio_grid"]
    assert len(grid) == 60 and grid[0] == pytest.approx(0.1) and grid[-1] == pytest.approx(5)


def test_chiral_requires_one_of_spec_or_sweep():
    with pytest.raises(ConfigError, match="exactly one"):
        parse_config({"kind": "chiral"})


def test_spec_parsed_to_chain():
    cfg = parse_config(base_spectrum())
    assert cfg["spec"] == ChainSpec(3, 400.0, 400.0)


def test_invalid_config_exit_code(tmp_path, capsys):
    cfg = base_spectrum()
    cfg["probe_site"] = 9
    path = write_config(tmp_path, cfg)
    assert main(["run", str(path)]) == 2
    assert "probe_site" in capsys.readouterr().err
    assert main(["validate", str(path)]) == 2


def test_unwritable_output(tmp_path, monkeypatch, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    monkeypatch.setenv("SSHLADDER_OUTPUT_DIR", str(blocker / "sub"))
    assert main(["run", "bands_topological"]) == 3


def test_output_dir_from_config(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv("SSHLADDER_OUTPUT_DIR", raising=False)
    cfg = {"kind": "bands", "j1_khz": 1, "j2_khz": 2, "n_k": 3, "output_dir": str(tmp_path / "o")}
    assert main(["run", str(write_config(tmp_path, cfg))]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["outputs"] == [str(tmp_path / "o" / "bands_bands.csv")]
    assert set(summary) == {"scenario", "config_hash", "outputs", "wall_time_ms"}
    assert summary["config_hash"] == config_hash(cfg)


@pytest.mark.parametrize("name", GOLDEN_PRESETS)
def test_golden_outputs(name, tmp_path, monkeypatch, capsys):
    summary = run_preset(name, tmp_path, monkeypatch, capsys)
    for path in map(Path, summary["outputs"]):
        assert path.read_bytes() == (GOLDEN / path.name).read_bytes(), path.name


def test_fig3_outputs(tmp_path, monkeypatch, capsys):
    summary = run_preset("fig3_spectrum", tmp_path, monkeypatch, capsys)
    trace_path, sticks_path = map(Path, summary["outputs"])
    first = trace_path.read_text().splitlines()[0]
    assert first.startswith("# sshladder 0.1.0 config_sha256=")
    header, data = read_csv(trace_path)
    assert header == ["detuning_khz", "intensity"]
    sticks = json.loads(sticks_path.read_text())
    assert sticks["probe_site"] == 2 and len(sticks["lines"]) == 6
    assert sticks["provenance"]["config_sha256"] == summary["config_hash"]


def test_fig4_layout(tmp_path, monkeypatch, capsys):
    summary = run_preset("fig4_eigensweep", tmp_path, monkeypatch, capsys)
    header, data = read_csv(summary["outputs"][0])
    assert header[-2:] == ["band_inner_over_j1", "band_outer_over_j1"]
    assert data.shape == (60, 11)
    ratio = data[:, 0]
    np.testing.assert_allclose(data[:, -1], 1 + 1 / ratio)


def test_fig6_layers(tmp_path, monkeypatch, capsys):
    summary = run_preset("fig6_chiral_sweep", tmp_path, monkeypatch, capsys)
    lines = Path(summary["outputs"][0]).read_text().splitlines()
    assert lines[1] == "layer,j1_khz,j2_khz,ratio,c_bar,diagonal_ensemble,ideal_winding"
    measured = [ln.split(",") for ln in lines[2:] if ln.startswith("measured-set")]
    assert [float(r[3]) for r in measured] == [0.2, 0.5, 1.0, 2.0, 5.0]
    assert [r[6] for r in measured] == ["1", "1", "0", "0", "0"]
    assert sum(ln.startswith("theory-") for ln in lines) == 3 * 49


def test_chiral_summary(tmp_path, monkeypatch, capsys):
    summary = run_preset("fig5_chiral_trivial", tmp_path, monkeypatch, capsys)
    names = [Path(p).name for p in summary["outputs"]]
    assert names == ["fig5_trivial_trajectory.csv", "fig5_trivial_chiral.csv", "fig5_trivial_summary.json"]
    header, traj = read_csv(summary["outputs"][0])
    assert header == ["t_us", "p1", "p2", "p3", "p4", "p5", "p6"]
    header, _ = read_csv(summary["outputs"][1])
    assert header == ["t_us", "c", "c_bar"]
    info = json.loads(Path(summary["outputs"][2]).read_text())
    assert info["initial_site"] == 4 and info["convention"] == "relative"
    assert abs(info["winding_estimate"]) < 0.15


def test_fit_roundtrip_outputs(tmp_path, monkeypatch, capsys):
    summary = run_preset("fit_roundtrip", tmp_path, monkeypatch, capsys)
    fit = json.loads(Path(summary["outputs"][1]).read_text())
    assert fit["converged"]
    assert np.max(np.abs(np.array(fit["centers_khz"]) - fit["true_energies_khz"])) < 5.0


def test_disorder_output(tmp_path, monkeypatch, capsys):
    summary = run_preset("disorder_winding", tmp_path, monkeypatch, capsys)
    lines = Path(summary["outputs"][0]).read_text().splitlines()
    assert lines[1] == "element,mean,std,n"
    name, mean, std, n = lines[2].split(",")
    assert name == "c_bar" and n == "200" and abs(float(mean) - 0.8455) < 0.2


def test_shortest_round_trip_format():
    assert fmt(0.1) == "0.1" and fmt(np.float64(1 / 3)) == repr(1 / 3) and fmt(np.int64(3)) == "3"
