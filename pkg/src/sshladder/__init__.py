"""Finite SSH chains on microwave-coupled level ladders.

Exact diagonalization, excitation spectra, quench dynamics, mean chiral
displacement and disorder ensembles for small Su-Schrieffer-Heeger chains.
Energies are frequencies in kHz, times in microseconds.
"""

__version__ = "0.1.0"

from .lattice import ChainSpec, build_hamiltonian, cell_position_operator, chiral_operator
from .spectra import (
    BandStructure,
    EigenSystem,
    SpectrumTrace,
    StickSpectrum,
    band_structure,
    broaden,
    eigendecompose,
    innermost_gap,
    stick_spectrum,
)
from .dynamics import (
    ChiralSeries,
    QuenchTrajectory,
    chiral_displacement,
    diagonal_ensemble_average,
    evolve,
    ideal_winding,
    winding_estimate,
)
from .fitting import LorentzianFit, eigenenergies_from_fit, fit_lorentzians, seed_guesses
from .disorder import DisorderModel, ensemble_statistics, sample_spec

__all__ = [
    "BandStructure",
    "ChainSpec",
    "ChiralSeries",
    "DisorderModel",
    "EigenSystem",
    "LorentzianFit",
    "QuenchTrajectory",
    "SpectrumTrace",
    "StickSpectrum",
    "band_structure",
    "broaden",
    "build_hamiltonian",
    "cell_position_operator",
    "chiral_displacement",
    "chiral_operator",
    "diagonal_ensemble_average",
    "eigendecompose",
    "eigenenergies_from_fit",
    "ensemble_statistics",
    "evolve",
    "fit_lorentzians",
    "ideal_winding",
    "innermost_gap",
    "sample_spec",
    "seed_guesses",
    "stick_spectrum",
    "winding_estimate",
]
