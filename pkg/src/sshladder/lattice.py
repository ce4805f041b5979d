"""SSH chain model: Hamiltonian, chiral and unit-cell position operators.

Sites are numbered 1..2N in every public interface. Site 2m-1 belongs to
sublattice A and site 2m to sublattice B of unit cell m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

JSON_KEYS = ("n_cells", "j_intra_khz", "j_inter_khz", "bond_overrides_khz", "onsite_khz")


def _finite_tuple(name: str, values: Sequence[float], length: int) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    if len(out) != length:
        raise ValueError(f"{name}: expected {length} entries, got {len(out)}")
    if not all(math.isfinite(v) for v in out):
        raise ValueError(f"{name}: entries must be finite")
    return out


@dataclass(frozen=True)
class ChainSpec:
    """Finite SSH chain with ``n_cells`` dimers.

    ``j_intra`` (J1) couples sites 2m-1 and 2m, ``j_inter`` (J2) couples 2m
    and 2m+1. ``bond_overrides`` replaces the alternating pattern bond by
    bond; ``onsite`` holds the detunings U_n. All rates in kHz.
    """

    n_cells: int
    j_intra: float
    j_inter: float
    bond_overrides: tuple[float, ...] | None = None
    onsite: tuple[float, ...] = field(default=())

    def __post_init__(self) -> None:
        if isinstance(self.n_cells, bool) or int(self.n_cells) != self.n_cells or self.n_cells < 1:
            raise ValueError(f"n_cells: must be a positive integer, got {self.n_cells!r}")
        object.__setattr__(self, "n_cells", int(self.n_cells))
        for name in ("j_intra", "j_inter"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name}: must be finite and >= 0, got {value!r}")
            object.__setattr__(self, name, value)
        if self.bond_overrides is not None:
            object.__setattr__(
                self,
                "bond_overrides",
                _finite_tuple("bond_overrides", self.bond_overrides, self.n_sites - 1),
            )
        onsite = self.onsite if len(self.onsite) else (0.0,) * self.n_sites
        object.__setattr__(self, "onsite", _finite_tuple("onsite", onsite, self.n_sites))

    @property
    def n_sites(self) -> int:
        return 2 * self.n_cells

    @property
    def bonds(self) -> tuple[float, ...]:
        """Rates J_{n,n+1} for n = 1..2N-1."""
        if self.bond_overrides is not None:
            return self.bond_overrides
        return tuple(self.j_intra if n % 2 == 1 else self.j_inter for n in range(1, self.n_sites))

    @property
    def ratio(self) -> float:
        return self.j_intra / self.j_inter if self.j_inter else math.inf

    @property
    def tau_weak(self) -> float:
        """1/min(J1, J2) in microseconds."""
        j = min(self.j_intra, self.j_inter)
        return 1e3 / j if j > 0 else math.inf

    @property
    def tau_strong(self) -> float:
        """1/max(J1, J2) in microseconds."""
        j = max(self.j_intra, self.j_inter)
        return 1e3 / j if j > 0 else math.inf

    def replace(self, **changes: Any) -> "ChainSpec":
        fields = {
            "n_cells": self.n_cells,
            "j_intra": self.j_intra,
            "j_inter": self.j_inter,
            "bond_overrides": self.bond_overrides,
            "onsite": self.onsite,
        }
        fields.update(changes)
        return ChainSpec(**fields)

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_cells": self.n_cells,
            "j_intra_khz": self.j_intra,
            "j_inter_khz": self.j_inter,
            "bond_overrides_khz": list(self.bond_overrides) if self.bond_overrides is not None else None,
            "onsite_khz": list(self.onsite),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ChainSpec":
        unknown = sorted(set(data) - set(JSON_KEYS))
        if unknown:
            raise ValueError(f"unknown keys: {', '.join(unknown)}")
        for key in ("n_cells", "j_intra_khz", "j_inter_khz"):
            if key not in data:
                raise ValueError(f"{key}: required")
        return cls(
            n_cells=data["n_cells"],
            j_intra=data["j_intra_khz"],
            j_inter=data["j_inter_khz"],
            bond_overrides=data.get("bond_overrides_khz"),
            onsite=data.get("onsite_khz") or (),
        )


def build_hamiltonian(spec: ChainSpec) -> np.ndarray:
    """Single-particle Hamiltonian in the site basis, kHz.

    Diagonal holds U_n and the (n, n+1) band holds -J_{n,n+1}. The result is
    read-only.
    """
    n = spec.n_sites
    h = np.zeros((n, n))
    h[np.arange(n), np.arange(n)] = spec.onsite
    idx = np.arange(n - 1)
    off = -np.asarray(spec.bonds, dtype=float)
    h[idx, idx + 1] = off
    h[idx + 1, idx] = off
    h.flags.writeable = False
    return h


def chiral_operator(n_cells: int) -> np.ndarray:
    """Diagonal of the chiral operator: +1 on A (odd) sites, -1 on B sites."""
    if n_cells < 1:
        raise ValueError("n_cells: must be >= 1")
    return np.tile([1.0, -1.0], n_cells)


def cell_position_operator(n_cells: int, origin_cell: int) -> np.ndarray:
    """Diagonal of the unit-cell position operator, m - origin_cell for m = 1..N."""
    if not 1 <= origin_cell <= n_cells:
        raise ValueError(f"origin_cell: must lie in 1..{n_cells}, got {origin_cell}")
    return np.repeat(np.arange(1, n_cells + 1, dtype=float) - origin_cell, 2)


def cell_of_site(site: int) -> int:
    return (site + 1) // 2
