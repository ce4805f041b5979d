"""Shared-width multi-Lorentzian least-squares fits of excitation spectra.

The solver is a damped Gauss-Newton (Levenberg-Marquardt) iteration on the
parameter vector [centers, log heights, log fwhm]; the log parameterization
keeps heights and width positive without constraints.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.signal import find_peaks, peak_widths

from .spectra import SpectrumTrace

LAMBDA_MAX = 1e12
STEP_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class LorentzianFit:
    n_peaks: int
    centers: np.ndarray
    heights: np.ndarray
    shared_fwhm: float
    residual_rms: float = float("nan")
    converged: bool = False
    iterations: int = 0
    underdetermined: bool = False
    objective_history: tuple[float, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "centers_khz": [float(c) for c in self.centers],
            "heights": [float(h) for h in self.heights],
            "shared_fwhm_khz": float(self.shared_fwhm),
            "residual_rms": float(self.residual_rms),
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
        }

    def model(self, x) -> np.ndarray:
        return lorentzian_sum(np.asarray(x, dtype=float), self.centers, self.heights, self.shared_fwhm)


def lorentzian_sum(x: np.ndarray, centers, heights, fwhm: float) -> np.ndarray:
    u = 2.0 * (x[:, None] - np.asarray(centers)[None, :]) / fwhm
    return (np.asarray(heights)[None, :] / (1.0 + u * u)).sum(axis=1)


def _sorted(centers, heights):
    order = np.argsort(centers, kind="stable")
    return np.asarray(centers, dtype=float)[order], np.asarray(heights, dtype=float)[order]


def seed_guesses(trace: SpectrumTrace, n_peaks: int) -> LorentzianFit:
    """Initial centers, heights and shared width from the most prominent maxima.

    When the trace has fewer local maxima than ``n_peaks`` the remaining
    centers are spread uniformly over the grid and the seed is flagged
    ``underdetermined``.
    """
    x, y = trace.detunings, trace.intensity
    if n_peaks < 1:
        raise ValueError("n_peaks: must be >= 1")
    if len(x) < 5 * n_peaks:
        raise ValueError(f"trace: need at least {5 * n_peaks} grid points for {n_peaks} peaks")
    step = float(x[1] - x[0])
    span = float(x[-1] - x[0])

    idx, props = find_peaks(y, prominence=0.0)
    idx = idx[props["prominences"] > 0]
    prom = props["prominences"][props["prominences"] > 0]
    # most prominent first, ties resolved by position
    order = np.lexsort((idx, -prom))[:n_peaks]
    chosen = np.sort(idx[order])

    if len(chosen):
        widths = peak_widths(y, chosen, rel_height=0.5)[0]
        fwhm = float(np.max(widths)) * step
    else:
        fwhm = span / (n_peaks + 1)
    fwhm = float(np.clip(fwhm, step, span))

    centers = list(x[chosen])
    heights = list(y[chosen])
    missing = n_peaks - len(chosen)
    for k in range(missing):
        c = x[0] + span * (k + 1) / (missing + 1)
        centers.append(c)
        heights.append(float(np.interp(c, x, y)))
    centers, heights = _sorted(centers, heights)
    return LorentzianFit(n_peaks, centers, heights, fwhm, underdetermined=missing > 0)


def _jacobian(x: np.ndarray, centers: np.ndarray, heights: np.ndarray, fwhm: float):
    u = 2.0 * (x[:, None] - centers[None, :]) / fwhm
    lor = 1.0 / (1.0 + u * u)
    model = lor @ heights
    d_center = heights * 4.0 * u * lor**2 / fwhm
    d_logh = heights * lor
    d_logf = (heights * 2.0 * u * u * lor**2).sum(axis=1, keepdims=True)
    return model, np.hstack([d_center, d_logh, d_logf])


def fit_lorentzians(
    trace: SpectrumTrace,
    seed: LorentzianFit,
    max_iter: int = 200,
    tol: float = 1e-10,
) -> LorentzianFit:
    """Least-squares fit of ``seed.n_peaks`` Lorentzians sharing one width."""
    x, y = trace.detunings, np.asarray(trace.intensity, dtype=float)
    n = seed.n_peaks
    floor = 1e-12 * max(float(np.max(np.abs(y))), 1e-300)
    theta = np.concatenate(
        [
            np.asarray(seed.centers, dtype=float),
            np.log(np.maximum(np.asarray(seed.heights, dtype=float), floor)),
            [np.log(seed.shared_fwhm)],
        ]
    )

    def unpack(p):
        return p[:n], np.exp(p[n : 2 * n]), float(np.exp(p[-1]))

    model, jac = _jacobian(x, *unpack(theta))
    r = model - y
    obj = float(r @ r)
    history = [obj]
    lam = 1e-3
    converged = False
    it = 0
    while it < max_iter:
        it += 1
        if obj == 0.0:
            converged = True
            break
        jtj = jac.T @ jac
        grad = jac.T @ r
        improved = False
        while lam <= LAMBDA_MAX:
            a = jtj + lam * np.diag(np.maximum(np.diag(jtj), 1e-30))
            try:
                step = -np.linalg.solve(a, grad)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            if not np.all(np.isfinite(step)):
                lam *= 10.0
                continue
            if np.linalg.norm(step) < STEP_TOL:
                converged = True
                break
            trial = theta + step
            t_model, t_jac = _jacobian(x, *unpack(trial))
            t_r = t_model - y
            t_obj = float(t_r @ t_r)
            if np.isfinite(t_obj) and t_obj < obj:
                rel = (obj - t_obj) / obj
                theta, model, jac, r, obj = trial, t_model, t_jac, t_r, t_obj
                history.append(obj)
                lam = max(lam / 10.0, 1e-12)
                improved = True
                if rel < tol:
                    converged = True
                break
            lam *= 10.0
        if converged or not improved:
            break

    centers, heights, fwhm = unpack(theta)
    centers, heights = _sorted(centers, heights)
    return LorentzianFit(
        n,
        centers,
        heights,
        fwhm,
        residual_rms=float(np.sqrt(obj / len(y))),
        converged=converged,
        iterations=it,
        underdetermined=seed.underdetermined,
        objective_history=tuple(history),
    )


def fit_spectrum(trace: SpectrumTrace, n_peaks: int, max_iter: int = 200, tol: float = 1e-10) -> LorentzianFit:
    return fit_lorentzians(trace, seed_guesses(trace, n_peaks), max_iter, tol)


def eigenenergies_from_fit(fit: LorentzianFit, j1: float) -> np.ndarray:
    """Fitted peak positions in units of J1, ascending."""
    if not j1 > 0:
        raise ValueError(f"j1: must be > 0, got {j1}")
    return np.sort(np.asarray(fit.centers, dtype=float) / j1)


def shuffled(fit: LorentzianFit, order) -> LorentzianFit:
    """Copy of a seed with its peaks listed in ``order``."""
    order = np.asarray(order)
    return replace(fit, centers=np.asarray(fit.centers)[order], heights=np.asarray(fit.heights)[order])
