"""Hybrid qubit-oscillator evolution in the generalized rotating wave approximation."""

from .model import ModelParams, SpectrumTable, adiabatic_energies, asymptotic_energy, build_spectrum
from .dynamics import (InitialStateSpec, StateCoefficients, ModeAmplitudes,
                       initial_coefficients, amplitudes_at)
from .density import (QubitDensity, OscillatorDensityRep, qubit_density,
                      oscillator_density, population_inversion, von_neumann_entropy)

__version__ = "0.1.0"

__all__ = [
    "ModelParams", "SpectrumTable", "adiabatic_energies", "asymptotic_energy",
    "build_spectrum", "InitialStateSpec", "StateCoefficients", "ModeAmplitudes",
    "initial_coefficients", "amplitudes_at", "QubitDensity", "OscillatorDensityRep",
    "qubit_density", "oscillator_density", "population_inversion", "von_neumann_entropy",
    "__version__",
]
