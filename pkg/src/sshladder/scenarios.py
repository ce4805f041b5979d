"""Scenario runners: turn a validated config into output files."""

from __future__ import annotations

from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .disorder import ensemble_statistics
from .dynamics import (
    chiral_displacement,
    chiral_observable,
    diagonal_ensemble_average,
    evolve,
    ideal_winding,
    long_time_chiral,
)
from .fitting import fit_lorentzians, seed_guesses
from .io import write_csv, write_json
from .lattice import ChainSpec
from .spectra import SpectrumTrace, band_edges, band_structure, broaden, default_grid, diagonalize, stick_spectrum


class Outputs:
    """Collects written files and stamps each with the provenance header."""

    def __init__(self, out_dir: Path, prefix: str, config_sha256: str):
        self.out_dir = out_dir
        self.prefix = prefix
        self.provenance = {"artifact": "sshladder", "version": __version__, "config_sha256": config_sha256}
        self.paths: list[Path] = []

    def _path(self, suffix: str) -> Path:
        return self.out_dir / f"{self.prefix}_{suffix}"

    def csv(self, suffix: str, header, rows) -> None:
        comment = f"sshladder {__version__} config_sha256={self.provenance['config_sha256']}"
        self.paths.append(write_csv(self._path(suffix), header, rows, [comment]))

    def json(self, suffix: str, payload: dict) -> None:
        self.paths.append(write_json(self._path(suffix), {**payload, "provenance": self.provenance}))


def _spectrum(cfg: dict, out: Outputs) -> None:
    spec = cfg["spec"]
    sticks = stick_spectrum(diagonalize(spec), cfg["probe_site"])
    grid = default_grid(sticks.energies, cfg["fwhm_khz"], cfg["grid_step_khz"])
    trace = broaden(sticks, cfg["fwhm_khz"], grid)
    out.csv("trace.csv", trace.header, trace.rows())
    out.json("sticks.json", {**sticks.to_dict(), "spec": spec.to_dict(), "fwhm_khz": cfg["fwhm_khz"]})


def _eigensweep(cfg: dict, out: Outputs) -> None:
    n, j1 = cfg["n_cells"], cfg["j1_khz"]
    header = ["ratio", "j1_khz", "j2_khz"]
    header += [f"e{k}_over_j1" for k in range(1, 2 * n + 1)]
    header += ["band_inner_over_j1", "band_outer_over_j1"]
    rows = []
    for ratio in cfg["ratio_grid"]:
        j2 = j1 / ratio
        w = diagonalize(ChainSpec(n, j1, j2)).eigenvalues
        inner, outer = band_edges(j1, j2)
        rows.append([ratio, j1, j2, *(w / j1), inner / j1, outer / j1])
    out.csv("eigensweep.csv", header, rows)


def _quench(cfg: dict, out: Outputs) -> None:
    traj = evolve(cfg["spec"], cfg["initial_site"], cfg["t_max_us"], cfg["dt_us"])
    out.csv("trajectory.csv", traj.header, traj.rows())


def _sweep_row(layer: str, n_cells: int, j1: float, j2: float, cfg: dict) -> list:
    spec = ChainSpec(n_cells, j1, j2)
    eig = diagonalize(spec)
    site = cfg["initial_site"]
    series = chiral_displacement(evolve(spec, site, cfg["t_max_us"], cfg["dt_us"], eig=eig), cfg["convention"])
    obs, _ = chiral_observable(n_cells, site, cfg["convention"])
    ratio = j1 / j2 if j2 else float("inf")
    return [layer, j1, j2, ratio, series.final_average, diagonal_ensemble_average(eig, site, obs), ideal_winding(j1, j2)]


def _chiral(cfg: dict, out: Outputs) -> None:
    if "spec" in cfg:
        spec = cfg["spec"]
        traj = evolve(spec, cfg["initial_site"], cfg["t_max_us"], cfg["dt_us"])
        series = chiral_displacement(traj, cfg["convention"])
        out.csv("trajectory.csv", traj.header, traj.rows())
        out.csv("chiral.csv", series.header, series.rows())
        out.json(
            "summary.json",
            {
                "spec": spec.to_dict(),
                "initial_site": cfg["initial_site"],
                "convention": cfg["convention"],
                "origin_cell": series.origin_cell,
                "t_avg_us": float(series.times[-1]),
                "winding_estimate": series.final_average,
                "diagonal_ensemble": long_time_chiral(spec, cfg["initial_site"], cfg["convention"]),
                "ideal_winding": ideal_winding(spec.j_intra, spec.j_inter),
            },
        )
        return
    sweep = cfg["sweep"]
    n = sweep["n_cells"]
    rows = [_sweep_row("measured-set", n, j1, j2, cfg) for j1, j2 in sweep["parameter_sets"]]
    for j1 in sweep["theory_j1_khz"]:
        rows += [_sweep_row(f"theory-j1-{j1!r}", n, j1, j1 / r, cfg) for r in sweep["ratio_grid"]]
    header = ["layer", "j1_khz", "j2_khz", "ratio", "c_bar", "diagonal_ensemble", "ideal_winding"]
    out.csv("sweep.csv", header, rows)


def _bands(cfg: dict, out: Outputs) -> None:
    bands = band_structure(cfg["j1_khz"], cfg["j2_khz"], cfg["n_k"])
    out.csv("bands.csv", bands.header, bands.rows())


def _fit_roundtrip(cfg: dict, out: Outputs) -> None:
    spec = cfg["spec"]
    sticks = stick_spectrum(diagonalize(spec), cfg["probe_site"])
    grid = default_grid(sticks.energies, cfg["fwhm_khz"], cfg["grid_step_khz"])
    clean = broaden(sticks, cfg["fwhm_khz"], grid)
    intensity = np.array(clean.intensity)
    if cfg["noise_fraction"] > 0:
        rng = np.random.default_rng(cfg["noise_seed"])
        amp = cfg["noise_fraction"] * float(intensity.max())
        intensity = intensity + rng.uniform(-amp, amp, intensity.size)
    trace = SpectrumTrace(clean.detunings, intensity, clean.fwhm)
    seed = seed_guesses(trace, cfg["n_peaks"])
    fit = fit_lorentzians(trace, seed, cfg["max_iter"], cfg["tol"])
    out.csv("trace.csv", trace.header, trace.rows())
    out.json(
        "fit.json",
        {
            **fit.to_dict(),
            "underdetermined_seed": seed.underdetermined,
            "true_energies_khz": sticks.energies,
            "true_weights": sticks.weights,
        },
    )


def _disorder(cfg: dict, out: Outputs) -> None:
    stats = ensemble_statistics(
        cfg["spec"],
        cfg["disorder"],
        cfg["n_samples"],
        cfg["observable"],
        initial_site=cfg["initial_site"],
        t_avg=cfg["t_max_us"],
        dt=cfg["dt_us"],
        probe_site=cfg["probe_site"],
        fwhm=cfg["fwhm_khz"],
    )
    out.csv("ensemble.csv", stats.header, stats.rows())


RUNNERS: dict[str, Callable[[dict, Outputs], None]] = {
    "spectrum": _spectrum,
    "eigensweep": _eigensweep,
    "quench": _quench,
    "chiral": _chiral,
    "bands": _bands,
    "fit-roundtrip": _fit_roundtrip,
    "disorder": _disorder,
}


def run_scenario(cfg: dict, out_dir: str | Path, config_sha256: str) -> list[Path]:
    """Run a parsed config, writing into ``out_dir``; returns the files written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out = Outputs(out_dir, cfg["output_prefix"], config_sha256)
    RUNNERS[cfg["kind"]](cfg, out)
    return out.paths
