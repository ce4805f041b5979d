"""Exit criteria for the simulator. Each test prints one PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s`` or
``python tests/test_acceptance.py``.
"""

import json
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.optimize import brentq
from scipy.signal import find_peaks

from sshladder import (
    ChainSpec,
    DisorderModel,
    band_structure,
    broaden,
    build_hamiltonian,
    chiral_displacement,
    eigendecompose,
    evolve,
    innermost_gap,
    sample_spec,
    stick_spectrum,
    winding_estimate,
)
from sshladder.cli import main
from sshladder.config import preset_names
from sshladder.disorder import spectral_asymmetry
from sshladder.dynamics import long_time_chiral
from sshladder.fitting import fit_spectrum
from sshladder.spectra import diagonalize

from conftest import ACCEPTANCE_LINES, PAPER_SETS


def report(number, name, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] AC{number} {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def random_specs(rng, count, max_cells=8, max_rate=1000.0):
    specs = []
    for _ in range(count):
        n = int(rng.integers(1, max_cells + 1))
        spec = ChainSpec(n, rng.uniform(0, max_rate), rng.uniform(0, max_rate))
        if rng.random() < 0.5:
            spec = spec.replace(bond_overrides=tuple(rng.uniform(0, max_rate, 2 * n - 1)))
        specs.append(spec)
    return specs


def test_ac1_chiral_spectral_symmetry():
    specs = random_specs(np.random.default_rng(1), 1000)
    start = time.perf_counter()
    worst = 0.0
    for spec in specs:
        w = eigendecompose(build_hamiltonian(spec)).eigenvalues
        worst = max(worst, float(np.max(np.abs(w + w[::-1]))))
    elapsed = time.perf_counter() - start
    report(1, "chiral spectral symmetry", worst < 1e-9 and elapsed < 5.0,
           f"max |eps_k + eps_(2N+1-k)| = {worst:.2e} kHz (tol 1e-9), {elapsed:.2f} s (limit 5 s)")


def test_ac2_uniform_chain_oracle():
    w = diagonalize(ChainSpec(3, 400.0, 400.0)).eigenvalues
    analytic = np.sort(-2 * 400.0 * np.cos(np.arange(1, 7) * np.pi / 7))
    quoted = np.array([-720.78, -498.79, -178.02, 178.02, 498.79, 720.78])
    err = max(np.max(np.abs(w - analytic)), np.max(np.abs(w - quoted)))
    report(2, "uniform-chain oracle", err < 0.01, f"max deviation {err:.3e} kHz (tol 0.01)")


def test_ac3_edge_state_splitting():
    spec = ChainSpec(3, 160.0, 800.0)
    gap = innermost_gap(spec)
    cubic = np.poly1d([1.0, -1356800.0, 4.4433408e11, -1.6777216e13])
    root = np.sqrt(brentq(cubic, 0.0, 100.0, xtol=1e-14))
    eig = diagonalize(spec)
    resolved = []
    for fwhm in (60.0, 65.0, 70.0):
        trace = broaden(stick_spectrum(eig, 2), fwhm)
        peaks = find_peaks(trace.intensity)[0]
        resolved.append(int(np.sum(np.abs(trace.detunings[peaks]) < 100.0)))
    ok = abs(gap - 12.29) <= 0.02 and abs(gap - 2 * root) < 1e-6 and resolved == [1, 1, 1]
    report(3, "edge-state splitting", ok,
           f"spacing {gap:.4f} kHz (target 12.29 +- 0.02), polynomial root +-{root:.4f} kHz, "
           f"peaks near zero at fwhm 60/65/70 kHz: {resolved}")


def test_ac4_rabi_oracle():
    traj = evolve(ChainSpec(1, 160.0, 0.0), 1, 15.0, 0.05)
    err = float(np.max(np.abs(traj.populations[:, 1] - np.sin(2 * np.pi * 0.16 * traj.times) ** 2)))
    report(4, "Rabi oracle", err < 1e-9, f"max |P2 - sin^2| = {err:.2e} (tol 1e-9)")


def test_ac5a_topological_plateau():
    value = winding_estimate(ChainSpec(3, 160.0, 800.0), 4, 15.0)
    report("5a", "topological plateau J1/J2=160/800", abs(value - 1.0) <= 0.15,
           f"C_bar(15 us) = {value:.4f}, |C_bar - 1| = {abs(value - 1):.4f} (tol 0.15); "
           f"long-time limit {long_time_chiral(ChainSpec(3, 160.0, 800.0)):.4f}")


def test_ac5b_trivial_plateau():
    value = winding_estimate(ChainSpec(3, 800.0, 160.0), 4, 15.0)
    report("5b", "trivial plateau J1/J2=800/160", abs(value) <= 0.15, f"C_bar(15 us) = {value:.4f} (tol 0.15)")


def test_ac5c_monotone_crossover():
    values = [winding_estimate(ChainSpec(3, j1, j2), 4, 15.0) for j1, j2 in PAPER_SETS]
    steps = np.diff(values)
    report("5c", "monotone crossover over J1/J2 = 0.2, 0.5, 1, 2, 5", bool(np.all(steps <= 0)),
           "C_bar(15 us) = " + ", ".join(f"{v:.4f}" for v in values) + f"; largest increase {max(steps.max(), 0):.4f}")


def test_ac6_long_time_oracle_equivalence():
    start = time.perf_counter()
    diffs = []
    for j1, j2 in PAPER_SETS:
        spec = ChainSpec(3, j1, j2)
        brute = chiral_displacement(evolve(spec, 4, 500.0, 0.05)).c_bar[-1]
        diffs.append(abs(brute - long_time_chiral(spec)))
    elapsed = time.perf_counter() - start
    report(6, "long-time oracle equivalence", max(diffs) < 0.01 and elapsed < 10.0,
           f"max |C_bar(500 us) - diagonal ensemble| = {max(diffs):.2e} (tol 0.01), {elapsed:.2f} s (limit 10 s)")


def test_ac7_band_structure():
    rng = np.random.default_rng(7)
    pairs = [tuple(rng.uniform(0, 1000, 2)) for _ in range(90)]
    pairs += [(j, j) for j in rng.uniform(1, 1000, 10)]
    worst, iff = 0.0, True
    for j1, j2 in pairs:
        bands = band_structure(j1, j2, 201)
        worst = max(worst, abs(bands.e_plus.min() - abs(j1 - j2)), abs(bands.e_plus.max() - (j1 + j2)))
        iff &= (bands.gap == 0.0) == (j1 == j2)
    report(7, "band structure", worst < 1e-9 and iff,
           f"max band-edge error {worst:.2e} kHz (tol 1e-9); gap closes iff J1 = J2: {iff}")


def test_ac8_fit_round_trip():
    sticks = stick_spectrum(diagonalize(ChainSpec(3, 400.0, 400.0)), 2)
    trace = broaden(sticks, 65.0)
    fit = fit_spectrum(trace, 6)
    center_err = float(np.max(np.abs(fit.centers - sticks.energies)))
    height_err = float(np.max(np.abs(fit.heights / sticks.weights - 1.0)))
    report(8, "fit round-trip", fit.converged and center_err < 1.0 and height_err < 0.02 and trace.step == 1.0,
           f"centers within {center_err:.2e} kHz (tol 1), heights within {100 * height_err:.2e} % (tol 2 %)")


def test_ac9_unitarity_and_determinism(tmp_path, monkeypatch, capsys):
    worst = 0.0
    for spec in random_specs(np.random.default_rng(9), 50, max_cells=6) + [ChainSpec(3, a, b) for a, b in PAPER_SETS]:
        for site in {1, spec.n_sites // 2 + 1, spec.n_sites}:
            traj = evolve(spec, site)
            worst = max(worst, float(np.max(np.abs(traj.populations.sum(axis=1) - 1.0))))
    identical = True
    for name in preset_names():
        outputs = []
        for run in ("a", "b"):
            monkeypatch.setenv("SSHLADDER_OUTPUT_DIR", str(tmp_path / run))
            assert main(["run", name]) == 0
            outputs.append(json.loads(capsys.readouterr().out)["outputs"])
        for a, b in zip(*outputs):
            identical &= Path(a).read_bytes() == Path(b).read_bytes()
    report(9, "unitarity and determinism", worst < 1e-9 and identical,
           f"max |sum P - 1| = {worst:.2e} (tol 1e-9); {len(preset_names())} presets byte-identical: {identical}")


def test_ac10_disorder_symmetry():
    base = ChainSpec(3, 160.0, 800.0)
    bond = DisorderModel(20.0, 0.0, "uniform-bounded", 10)
    onsite = DisorderModel(0.0, 50.0, "uniform-bounded", 10)
    bond_asym = [spectral_asymmetry(diagonalize(sample_spec(base, bond, i)).eigenvalues) for i in range(200)]
    onsite_asym = [spectral_asymmetry(diagonalize(sample_spec(base, onsite, i)).eigenvalues) for i in range(200)]
    ok = max(bond_asym) < 1e-9 and float(np.median(onsite_asym)) > 1.0
    report(10, "disorder symmetry", ok,
           f"bond disorder max asymmetry {max(bond_asym):.2e} kHz (tol 1e-9); "
           f"detuning disorder median asymmetry {np.median(onsite_asym):.2f} kHz (> 1)")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
