"""Exact diagonalization, excitation spectra and infinite-lattice bands."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._jacobi import jacobi_eigh
from .lattice import ChainSpec, build_hamiltonian

DEGENERACY_TOL_KHZ = 1e-6
SIGN_TOL = 1e-8


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Ascending eigenvalues (kHz) and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def degenerate_groups(self, tol: float = DEGENERACY_TOL_KHZ) -> list[np.ndarray]:
        """Index blocks of eigenvalues whose consecutive spacing is below ``tol``."""
        groups, start = [], 0
        for i in range(1, self.dim + 1):
            if i == self.dim or self.eigenvalues[i] - self.eigenvalues[i - 1] >= tol:
                groups.append(np.arange(start, i))
                start = i
        return groups


def _gram_schmidt(block: np.ndarray) -> np.ndarray:
    out = np.array(block, dtype=float)
    for j in range(out.shape[1]):
        for i in range(j):
            out[:, j] -= (out[:, i] @ out[:, j]) * out[:, i]
        out[:, j] /= np.linalg.norm(out[:, j])
    return out


def eigendecompose(h: np.ndarray) -> EigenSystem:
    """Diagonalize a real symmetric matrix with cyclic Jacobi rotations.

    Eigenvalues come back ascending (ties keep the solver's index order).
    Degenerate blocks are re-orthonormalized in index order and every
    eigenvector is signed so its first non-negligible component is positive.
    """
    h = np.asarray(h, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"h: expected a square matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ValueError("h: entries must be finite")
    scale = max(float(np.max(np.abs(h))), 1.0) if h.size else 1.0
    if np.max(np.abs(h - h.T), initial=0.0) > 1e-12 * scale:
        raise ValueError("h: matrix must be symmetric")
    w, v, _ = jacobi_eigh(0.5 * (h + h.T))
    order = np.argsort(w, kind="stable")
    w, v = w[order], v[:, order]
    eig = EigenSystem(w, v)
    for g in eig.degenerate_groups():
        if len(g) > 1:
            v[:, g] = _gram_schmidt(v[:, g])
    for b in range(v.shape[1]):
        big = np.flatnonzero(np.abs(v[:, b]) > SIGN_TOL)
        if len(big) and v[big[0], b] < 0:
            v[:, b] = -v[:, b]
    return EigenSystem(_frozen(w), _frozen(v))


def diagonalize(spec: ChainSpec) -> EigenSystem:
    return eigendecompose(build_hamiltonian(spec))


def innermost_gap(spec: ChainSpec) -> float:
    """Spacing of the two middle eigenvalues, eps_{N+1} - eps_N, in kHz."""
    w = diagonalize(spec).eigenvalues
    n = spec.n_cells
    return float(w[n] - w[n - 1])


@dataclass(frozen=True, eq=False)
class StickSpectrum:
    """Unbroadened excitation lines seen from one bare site."""

    probe_site: int
    energies: np.ndarray
    weights: np.ndarray

    @property
    def lines(self) -> list[tuple[float, float]]:
        return [(float(e), float(w)) for e, w in zip(self.energies, self.weights)]

    def to_dict(self) -> dict:
        return {
            "probe_site": self.probe_site,
            "lines": [{"energy_khz": e, "weight": w} for e, w in self.lines],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StickSpectrum":
        lines = data["lines"]
        return cls(
            int(data["probe_site"]),
            _frozen([ln["energy_khz"] for ln in lines]),
            _frozen([ln["weight"] for ln in lines]),
        )


def stick_spectrum(eig: EigenSystem, probe_site: int) -> StickSpectrum:
    """Lines (eps_beta, |<beta|n_i>|^2) for the bare site ``probe_site`` (1-based)."""
    if not 1 <= probe_site <= eig.dim:
        raise ValueError(f"probe_site: must lie in 1..{eig.dim}, got {probe_site}")
    weights = eig.eigenvectors[probe_site - 1, :] ** 2
    return StickSpectrum(probe_site, eig.eigenvalues, _frozen(weights))


@dataclass(frozen=True, eq=False)
class SpectrumTrace:
    detunings: np.ndarray
    intensity: np.ndarray
    fwhm: float

    header = ("detuning_khz", "intensity")

    def rows(self):
        return zip(self.detunings, self.intensity)

    @property
    def step(self) -> float:
        return float(self.detunings[1] - self.detunings[0])


def lorentzian(x, fwhm: float):
    """Unit-peak-height Lorentzian of full width ``fwhm`` centred at zero."""
    return 1.0 / (1.0 + (2.0 * np.asarray(x, dtype=float) / fwhm) ** 2)


def _check_grid(grid: np.ndarray) -> None:
    if grid.ndim != 1 or len(grid) < 2:
        raise ValueError("grid: need at least two points")
    d = np.diff(grid)
    if np.any(d <= 0):
        raise ValueError("grid: must be strictly increasing")
    if np.max(np.abs(d - d[0])) > 1e-9 * max(abs(d[0]), np.max(np.abs(grid))):
        raise ValueError("grid: must be uniform")


def default_grid(energies: Sequence[float], fwhm: float, step: float = 1.0) -> np.ndarray:
    """Uniform grid over [min - 3 fwhm, max + 3 fwhm] with spacing ``step``."""
    lo = float(np.min(energies)) - 3.0 * fwhm
    hi = float(np.max(energies)) + 3.0 * fwhm
    n = int(np.ceil((hi - lo) / step - 1e-9))
    return lo + step * np.arange(n + 1)


def broaden(sticks: StickSpectrum, fwhm: float, grid: np.ndarray | None = None) -> SpectrumTrace:
    """Sum of unit-height Lorentzians of shared ``fwhm``, one per stick, weighted."""
    if not fwhm > 0:
        raise ValueError(f"fwhm: must be > 0, got {fwhm}")
    grid = default_grid(sticks.energies, fwhm) if grid is None else np.asarray(grid, dtype=float)
    _check_grid(grid)
    kernel = lorentzian(grid[:, None] - sticks.energies[None, :], fwhm)
    intensity = kernel @ sticks.weights
    return SpectrumTrace(_frozen(grid), _frozen(np.maximum(intensity, 0.0)), float(fwhm))


@dataclass(frozen=True, eq=False)
class BandStructure:
    k_grid: np.ndarray
    e_plus: np.ndarray
    e_minus: np.ndarray

    header = ("k", "e_plus_khz", "e_minus_khz")

    def rows(self):
        return zip(self.k_grid, self.e_plus, self.e_minus)

    @property
    def gap(self) -> float:
        return 2.0 * float(np.min(self.e_plus))


def band_energy(j1: float, j2: float, k):
    """sqrt(J1^2 + J2^2 + 2 J1 J2 cos k), written without cancellation near the gap.

    1 + cos k = 2 sin^2((pi - k)/2), which is exactly zero at k = pi.
    """
    return np.sqrt((j1 - j2) ** 2 + 4.0 * j1 * j2 * np.sin((np.pi - np.asarray(k)) / 2.0) ** 2)


def band_structure(j1: float, j2: float, n_k: int = 201) -> BandStructure:
    """Bulk bands +-|J1 + J2 e^{ik}| of the infinite chain on k in [0, pi]."""
    if n_k < 2:
        raise ValueError("n_k: must be >= 2")
    k = np.linspace(0.0, np.pi, n_k)
    e = band_energy(j1, j2, k)
    return BandStructure(_frozen(k), _frozen(e), _frozen(-e))


def band_edges(j1: float, j2: float) -> tuple[float, float]:
    """Inner and outer edge of the positive band, |J1 - J2| and J1 + J2."""
    return abs(j1 - j2), j1 + j2
