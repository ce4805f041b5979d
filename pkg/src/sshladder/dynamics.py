"""Quench dynamics and the mean chiral displacement.

Propagation is spectral: with H = V diag(eps) V^T, the amplitude on site i
after time t is sum_b V_ib V_0b exp(-2 pi i eps_b t), where eps is in kHz and
t in microseconds (hence the 1e-3 factor).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .lattice import ChainSpec, build_hamiltonian, cell_of_site, cell_position_operator, chiral_operator
from .spectra import EigenSystem, _frozen, eigendecompose

DEFAULT_DT_US = 0.05
DEFAULT_T_AVG_US = 15.0
DEFAULT_INITIAL_SITE = 4

Convention = Literal["relative", "literal-eq4"]
CONVENTIONS = ("relative", "literal-eq4")


@dataclass(frozen=True, eq=False)
class QuenchTrajectory:
    initial_site: int
    times: np.ndarray
    populations: np.ndarray  # shape (len(times), 2N)

    @property
    def n_sites(self) -> int:
        return self.populations.shape[1]

    @property
    def header(self) -> tuple[str, ...]:
        return ("t_us",) + tuple(f"p{i}" for i in range(1, self.n_sites + 1))

    def rows(self):
        return (np.concatenate(([t], p)) for t, p in zip(self.times, self.populations))


@dataclass(frozen=True, eq=False)
class ChiralSeries:
    times: np.ndarray
    c_of_t: np.ndarray
    c_bar: np.ndarray
    origin_cell: int
    convention: str

    header = ("t_us", "c", "c_bar")

    def rows(self):
        return zip(self.times, self.c_of_t, self.c_bar)

    @property
    def final_average(self) -> float:
        return float(self.c_bar[-1])


def time_grid(t_max: float, dt: float) -> np.ndarray:
    """Uniform grid 0, dt, 2 dt, ... up to ``t_max`` (inclusive when commensurate)."""
    if not dt > 0:
        raise ValueError(f"dt: must be > 0, got {dt}")
    if not t_max >= dt:
        raise ValueError(f"t_max: must be >= dt, got {t_max}")
    n = round(t_max / dt)
    if abs(n * dt - t_max) > 1e-9 * t_max:
        n = math.floor(t_max / dt)
    return dt * np.arange(n + 1)


def amplitudes(eig: EigenSystem, initial_site: int, times) -> np.ndarray:
    """Complex site amplitudes, shape (len(times), dim). Negative times allowed."""
    if not 1 <= initial_site <= eig.dim:
        raise ValueError(f"initial_site: must lie in 1..{eig.dim}, got {initial_site}")
    v = eig.eigenvectors
    times = np.asarray(times, dtype=float)
    phases = np.exp(-2j * np.pi * 1e-3 * np.outer(times, eig.eigenvalues))
    return (phases * v[initial_site - 1]) @ v.T


def propagate(eig: EigenSystem, psi, t: float) -> np.ndarray:
    """Apply exp(-iHt) to an arbitrary state vector."""
    v = eig.eigenvectors
    phase = np.exp(-2j * np.pi * 1e-3 * t * eig.eigenvalues)
    return v @ (phase * (v.T @ np.asarray(psi, dtype=complex)))


def evolve(
    spec: ChainSpec,
    initial_site: int = DEFAULT_INITIAL_SITE,
    t_max: float = DEFAULT_T_AVG_US,
    dt: float = DEFAULT_DT_US,
    eig: EigenSystem | None = None,
) -> QuenchTrajectory:
    """Site populations after a quench from a single bare site."""
    if not 1 <= initial_site <= spec.n_sites:
        raise ValueError(f"initial_site: must lie in 1..{spec.n_sites}, got {initial_site}")
    times = time_grid(t_max, dt)
    eig = eig or eigendecompose(build_hamiltonian(spec))
    pops = np.abs(amplitudes(eig, initial_site, times)) ** 2
    return QuenchTrajectory(initial_site, _frozen(times), _frozen(pops))


def chiral_observable(n_cells: int, initial_site: int, convention: str = "relative") -> tuple[np.ndarray, int]:
    """Diagonal of 2 Gamma (m - m0) and the origin cell m0 used.

    ``relative`` puts the origin at the cell of the initial site;
    ``literal-eq4`` uses the absolute labels m = 1..N (origin 0).
    """
    if convention == "relative":
        origin = cell_of_site(initial_site)
        m = cell_position_operator(n_cells, origin)
    elif convention == "literal-eq4":
        origin = 0
        m = cell_position_operator(n_cells, 1) + 1.0
    else:
        raise ValueError(f"convention: expected one of {CONVENTIONS}, got {convention!r}")
    return 2.0 * chiral_operator(n_cells) * m, origin


def cumulative_average(times: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Running trapezoidal mean (1/t) int_0^t f, with the t=0 entry set to f(0)."""
    integral = cumulative_trapezoid(values, times, initial=0.0)
    out = np.empty_like(integral)
    out[0] = values[0]
    out[1:] = integral[1:] / (times[1:] - times[0])
    return out


def chiral_displacement(traj: QuenchTrajectory, convention: Convention = "relative") -> ChiralSeries:
    """C(t) = 2 <Gamma m(t)> from populations, plus its cumulative average."""
    n_cells = traj.n_sites // 2
    obs, origin = chiral_observable(n_cells, traj.initial_site, convention)
    c = traj.populations @ obs
    return ChiralSeries(traj.times, _frozen(c), _frozen(cumulative_average(traj.times, c)), origin, convention)


def diagonal_ensemble_average(eig: EigenSystem, initial_site: int, observable) -> float:
    """Infinite-time average of a site-diagonal observable after a quench.

    Sums <psi_g| O |psi_g> over degenerate eigenvalue groups g, where psi_g is
    the projection of the initial site state onto group g.
    """
    if not 1 <= initial_site <= eig.dim:
        raise ValueError(f"initial_site: must lie in 1..{eig.dim}, got {initial_site}")
    obs = np.asarray(observable, dtype=float)
    v = eig.eigenvectors
    total = 0.0
    for g in eig.degenerate_groups():
        vg = v[:, g]
        psi_g = vg @ vg[initial_site - 1]
        total += float(psi_g @ (obs * psi_g))
    return total


def long_time_chiral(spec: ChainSpec, initial_site: int = DEFAULT_INITIAL_SITE, convention: Convention = "relative") -> float:
    """Diagonal-ensemble value of C for a quench from ``initial_site``."""
    eig = eigendecompose(build_hamiltonian(spec))
    obs, _ = chiral_observable(spec.n_cells, initial_site, convention)
    return diagonal_ensemble_average(eig, initial_site, obs)


def winding_estimate(
    spec: ChainSpec,
    initial_site: int = DEFAULT_INITIAL_SITE,
    t_avg: float = DEFAULT_T_AVG_US,
    dt: float = DEFAULT_DT_US,
) -> float:
    """Cumulative average of C at ``t_avg`` under the relative convention."""
    if not (t_avg > spec.tau_weak and t_avg > spec.tau_strong):
        warnings.warn(
            f"t_avg={t_avg} us does not exceed tau_w={spec.tau_weak:.4g} us and "
            f"tau_s={spec.tau_strong:.4g} us; the average may not have settled",
            RuntimeWarning,
            stacklevel=2,
        )
    traj = evolve(spec, initial_site, t_avg, dt)
    return chiral_displacement(traj, "relative").final_average


def ideal_winding(j1: float, j2: float) -> int:
    """Winding number of the infinite chain: 1 if J1 < J2, else 0."""
    if j1 < 0 or j2 < 0:
        raise ValueError("j1, j2: must be >= 0")
    if j1 == 0 and j2 == 0:
        raise ValueError("j1, j2: must not both be zero")
    return 1 if j1 < j2 else 0
