"""Reduced density matrices and qubit-side scalar measures.

The bipartite pure state in branch form |Psi> = sum_m (u_m |1,m_+> + v_m |-1,m_->)
gives the qubit reduced density matrix

    rho_Q = [[1/2 + varrho, xi], [xi*, 1/2 - varrho]]

with varrho = (||u||^2 - ||v||^2)/2 and xi = <psi_-|psi_+> evaluated through the
displaced-number overlap table M_{m',m} (the double sum over mode amplitudes,
organised as a bilinear form).  The oscillator density is kept symbolically as
the branch amplitudes; fock-oracle and phase-space consume it directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import ModeAmplitudes
from .model import ModelParams
from .specfun import displaced_overlap_table


@dataclass(frozen=True)
class QubitDensity:
    varrho: float
    xi: complex
    t: float

    @property
    def varpi(self) -> float:
        return math.hypot(self.varrho, abs(self.xi))

    def eigenvalues(self) -> tuple[float, float]:
        w = self.varpi
        return 0.5 + w, 0.5 - w

    def as_matrix(self) -> np.ndarray:
        return np.array([[0.5 + self.varrho, self.xi],
                         [np.conj(self.xi), 0.5 - self.varrho]], dtype=complex)


@dataclass(frozen=True)
class OscillatorDensityRep:
    """rho_O in the displaced-projector basis: amplitudes plus parameters."""

    c0t: complex
    a: np.ndarray
    b: np.ndarray
    params: ModelParams
    modes: ModeAmplitudes

    def branch_vectors(self) -> tuple[np.ndarray, np.ndarray]:
        return self.modes.branch_vectors()


def oscillator_density(modes: ModeAmplitudes) -> OscillatorDensityRep:
    return OscillatorDensityRep(c0t=modes.c0t, a=modes.a, b=modes.b,
                                params=modes.params, modes=modes)


def qubit_density(modes: ModeAmplitudes, overlaps: np.ndarray | None = None) -> QubitDensity:
    """rho_Q elements from the mode amplitudes.

    `overlaps` is the (N+1)x(N+1) table M_{m,n}; it is rebuilt when omitted
    (pass it in when scanning many times at fixed parameters).
    """
    u, v = modes.branch_vectors()
    if overlaps is None:
        overlaps = displaced_overlap_table(len(u) - 1, modes.params.x)
    elif overlaps.shape[0] < len(u):
        raise ValueError("overlap table smaller than the state truncation")
    varrho = 0.5 * float(np.sum(np.abs(u) ** 2) - np.sum(np.abs(v) ** 2))
    m = overlaps[: len(u), : len(u)]
    xi = complex(np.conj(v) @ m @ u)   # sum_{m',m} v*_{m'} M_{m',m} u_m
    return QubitDensity(varrho=varrho, xi=xi, t=modes.t)


def population_inversion(q: QubitDensity) -> float:
    """<sigma_z> = 2 varrho."""
    return 2.0 * q.varrho


def von_neumann_entropy(q: QubitDensity) -> float:
    """Natural-log entropy of the 2x2 density; 0 log 0 := 0.

    varpi may exceed 1/2 by truncation rounding; it is clamped.
    """
    w = min(q.varpi, 0.5)
    out = 0.0
    for p in (0.5 + w, 0.5 - w):
        if p > 0.0:
            out -= p * math.log(p)
    return out
