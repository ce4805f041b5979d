"""Cyclic Jacobi eigensolver for dense real symmetric matrices."""

from __future__ import annotations

import numpy as np
from numba import njit

MAX_SWEEPS = 100


@njit(cache=True, nogil=True)
def _jacobi(a, rel_tol, max_sweeps):
    n = a.shape[0]
    v = np.eye(n)
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += a[i, j] * a[i, j]
    scale = np.sqrt(scale)
    threshold = rel_tol * scale
    sweeps = 0
    while sweeps < max_sweeps:
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += 2.0 * a[i, j] * a[i, j]
        if np.sqrt(off) <= threshold:
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(1.0 + theta * theta))
                else:
                    t = -1.0 / (-theta + np.sqrt(1.0 + theta * theta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                tau = s / (1.0 + c)
                app = a[p, p]
                aqq = a[q, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for r in range(n):
                    if r != p and r != q:
                        arp = a[r, p]
                        arq = a[r, q]
                        a[r, p] = arp - s * (arq + tau * arp)
                        a[r, q] = arq + s * (arp - tau * arq)
                        a[p, r] = a[r, p]
                        a[q, r] = a[r, q]
                for r in range(n):
                    vrp = v[r, p]
                    vrq = v[r, q]
                    v[r, p] = vrp - s * (vrq + tau * vrp)
                    v[r, q] = vrq + s * (vrp - tau * vrq)
    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i]
    return w, v, sweeps


def jacobi_eigh(a: np.ndarray, rel_tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray, int]:
    """Eigenvalues (unsorted), eigenvector columns and sweep count.

    Sweeps stop once the off-diagonal Frobenius norm drops below
    ``rel_tol`` times the Frobenius norm of ``a``.
    """
    work = np.array(a, dtype=np.float64, order="C", copy=True)
    # unit max-norm keeps squared sums clear of underflow and overflow
    scale = float(np.max(np.abs(work))) if work.size else 0.0
    if scale > 0:
        work /= scale
    w, v, sweeps = _jacobi(work, rel_tol, MAX_SWEEPS)
    if scale > 0:
        w *= scale
    if sweeps >= MAX_SWEEPS:
        raise RuntimeError("Jacobi iteration did not converge")
    return w, v, sweeps
