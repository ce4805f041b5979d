"""Seeded ensembles of perturbed chains.

Every random draw is a pure function of (seed, sample_index, slot), so a
sample can be regenerated on its own and ensembles come out identical no
matter how many workers evaluate them.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .dynamics import DEFAULT_DT_US, DEFAULT_INITIAL_SITE, DEFAULT_T_AVG_US, winding_estimate
from .lattice import ChainSpec
from .spectra import broaden, default_grid, diagonalize, stick_spectrum

BOND_SLOT = 0
ONSITE_SLOT = 1
DISTRIBUTIONS = ("uniform-bounded", "gaussian")
OBSERVABLES = ("eigenvalues", "winding_estimate", "spectrum")


@dataclass(frozen=True)
class DisorderModel:
    """Bond-rate and on-site perturbation scales in kHz.

    For ``uniform-bounded`` the scales are hard bounds, for ``gaussian``
    standard deviations.
    """

    sigma_j: float = 0.0
    sigma_u: float = 0.0
    distribution: str = "uniform-bounded"
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("sigma_j", "sigma_u"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name}: must be finite and >= 0, got {value!r}")
            object.__setattr__(self, name, value)
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"distribution: expected one of {DISTRIBUTIONS}, got {self.distribution!r}")
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValueError(f"seed: must be an integer in [0, 2**64), got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed))

    def to_dict(self) -> dict:
        return {
            "sigma_j_khz": self.sigma_j,
            "sigma_u_khz": self.sigma_u,
            "distribution": self.distribution,
            "seed": self.seed,
        }


def _draws(model: DisorderModel, sample_index: int, slot: int, size: int, scale: float) -> np.ndarray:
    rng = np.random.default_rng([model.seed, sample_index, slot])
    if model.distribution == "gaussian":
        return rng.normal(0.0, scale, size)
    return rng.uniform(-scale, scale, size)


def sample_spec(base: ChainSpec, model: DisorderModel, sample_index: int) -> ChainSpec:
    """Member ``sample_index`` of the disorder ensemble around ``base``."""
    if sample_index < 0:
        raise ValueError("sample_index: must be >= 0")
    changes = {}
    if model.sigma_j > 0:
        bonds = np.asarray(base.bonds) + _draws(model, sample_index, BOND_SLOT, base.n_sites - 1, model.sigma_j)
        changes["bond_overrides"] = tuple(bonds.tolist())
    if model.sigma_u > 0:
        onsite = np.asarray(base.onsite) + _draws(model, sample_index, ONSITE_SLOT, base.n_sites, model.sigma_u)
        changes["onsite"] = tuple(onsite.tolist())
    return base.replace(**changes) if changes else base


@dataclass(frozen=True, eq=False)
class EnsembleStats:
    labels: tuple[str, ...]
    mean: np.ndarray
    std: np.ndarray
    n: int
    samples: np.ndarray

    header = ("element", "mean", "std", "n")

    def rows(self):
        return ((lab, m, s, self.n) for lab, m, s in zip(self.labels, self.mean, self.std))


def spectral_asymmetry(eigenvalues) -> float:
    """max_k |eps_k + eps_{2N+1-k}| of a sorted spectrum."""
    w = np.asarray(eigenvalues, dtype=float)
    return float(np.max(np.abs(w + w[::-1])))


def _fsum_stats(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = samples.shape[0]
    mean = np.array([math.fsum(col) / n for col in samples.T])
    std = np.array([math.sqrt(math.fsum((col - m) ** 2) / (n - 1)) for col, m in zip(samples.T, mean)])
    return mean, std


def ensemble_statistics(
    base: ChainSpec,
    model: DisorderModel,
    n_samples: int,
    observable: Literal["eigenvalues", "winding_estimate", "spectrum"] = "eigenvalues",
    *,
    initial_site: int = DEFAULT_INITIAL_SITE,
    t_avg: float = DEFAULT_T_AVG_US,
    dt: float = DEFAULT_DT_US,
    probe_site: int = 2,
    fwhm: float = 65.0,
    grid=None,
    workers: int = 1,
) -> EnsembleStats:
    """Element-wise mean and (n-1)-normalized standard deviation over the ensemble.

    ``eigenvalues`` yields one element per sorted eigenvalue, ``winding_estimate``
    a single element, ``spectrum`` one element per detuning grid point.
    """
    if n_samples < 2:
        raise ValueError("n_samples: must be >= 2")
    if observable not in OBSERVABLES:
        raise ValueError(f"observable: expected one of {OBSERVABLES}, got {observable!r}")

    if observable == "eigenvalues":
        labels = tuple(f"eps{k}_khz" for k in range(1, base.n_sites + 1))

        def evaluate(spec):
            return diagonalize(spec).eigenvalues

    elif observable == "winding_estimate":
        labels = ("c_bar",)

        def evaluate(spec):
            return np.array([winding_estimate(spec, initial_site, t_avg, dt)])

    else:
        if grid is None:
            # widen the clean-spectrum window by the largest plausible shift
            reach = 2.0 * model.sigma_j + model.sigma_u
            if model.distribution == "gaussian":
                reach *= 4.0
            w = diagonalize(base).eigenvalues
            grid = default_grid([w[0] - reach, w[-1] + reach], fwhm)
        grid = np.asarray(grid, dtype=float)
        labels = tuple(f"{x!r}" for x in grid.tolist())

        def evaluate(spec):
            return broaden(stick_spectrum(diagonalize(spec), probe_site), fwhm, grid).intensity

    def one(i: int) -> np.ndarray:
        return np.asarray(evaluate(sample_spec(base, model, i)), dtype=float)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, range(n_samples)))
    else:
        rows = [one(i) for i in range(n_samples)]
    samples = np.vstack(rows)
    mean, std = _fsum_stats(samples)
    return EnsembleStats(labels, mean, std, n_samples, samples)
