"""Model parameters and the block-diagonalized eigensystem.

The Hamiltonian (units hbar = 1, energies in units of the oscillator frequency)

    H = omega a^dag a + (Delta/2) sigma_x + lambda sigma_z (a^dag + a)

is block diagonalized in the displaced (adiabatic) basis: an uncoupled singlet
ground state plus a tower of 2x2 doublet blocks mixing |E^(+)_{n-1}> with
|E^(-)_n>.  `build_spectrum` materialises the whole tower up to a truncation:
energies, mixing amplitudes and the sign convention for the off-diagonal
coupling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specfun import laguerre_row


@dataclass(frozen=True)
class ModelParams:
    """Physical constants; x and delta_tilde are always derived, never stored."""

    omega: float
    delta: float
    lam: float

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.delta < 0 or self.lam < 0:
            raise ValueError("delta and lambda must be nonnegative")

    @property
    def x(self) -> float:
        return 4.0 * self.lam ** 2 / self.omega ** 2

    @property
    def delta_tilde(self) -> float:
        return self.delta * math.exp(-0.5 * self.x)

    @property
    def g(self) -> float:
        """Displacement amplitude lambda/omega = sqrt(x)/2."""
        return self.lam / self.omega


def adiabatic_energies(params: ModelParams, n: int) -> tuple[float, float]:
    """(E_n^(+), E_n^(-)) of the adiabatic doublet at photon index n."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    from .specfun import laguerre

    base = params.omega * (n - params.x / 4.0)
    split = 0.5 * params.delta_tilde * laguerre(n, 0, params.x)
    return base + split, base - split


@dataclass(frozen=True)
class SpectrumTable:
    """Eigenvalues and 2x2 mixing data of the block-diagonalized Hamiltonian.

    Arrays are indexed by doublet number n = 1..truncation_n (position n-1).
    """

    params: ModelParams
    truncation_n: int
    ground_energy: float
    energies_plus: np.ndarray
    energies_minus: np.ndarray
    zeta: np.ndarray
    chi: np.ndarray
    eps: np.ndarray
    mu_plus: np.ndarray
    mu_minus: np.ndarray
    zeta_sign: np.ndarray


def build_spectrum(params: ModelParams, truncation_n: int) -> SpectrumTable:
    """Assemble the spectrum tower up to doublet truncation_n (>= 1)."""
    if truncation_n < 1:
        raise ValueError("truncation_n must be at least 1")
    x, omega, dt = params.x, params.omega, params.delta_tilde
    N = truncation_n
    n = np.arange(1, N + 1, dtype=float)

    lag0 = laguerre_row(N, 0, x)           # L_n(x), n = 0..N
    lag1 = laguerre_row(N - 1, 1, x)       # L_n^{(1)}(x), n = 0..N-1

    if x == 0.0:
        zeta = np.zeros(N)
    else:
        zeta = 0.5 * dt * np.sqrt(x / n) * lag1
    e_plus_upper = omega * ((n - 1) - x / 4.0) + 0.5 * dt * lag0[:-1]   # E^(+)_{n-1}
    e_minus_lower = omega * (n - x / 4.0) - 0.5 * dt * lag0[1:]         # E^(-)_n
    eps = 0.5 * (e_plus_upper - e_minus_lower)
    chi = np.hypot(zeta, eps)

    mean = 0.5 * (e_plus_upper + e_minus_lower)
    energies_plus = mean + chi
    energies_minus = mean - chi

    with np.errstate(invalid="ignore", divide="ignore"):
        mu_plus = np.sqrt(np.clip((chi + eps) / (2.0 * chi), 0.0, 1.0))
        mu_minus = np.sqrt(np.clip((chi - eps) / (2.0 * chi), 0.0, 1.0))
    degenerate = chi == 0.0
    if np.any(degenerate):
        mu_plus = np.where(degenerate, 1.0, mu_plus)
        mu_minus = np.where(degenerate, 0.0, mu_minus)

    zeta_sign = np.where(zeta < 0.0, -1.0, 1.0)
    ground = -omega * x / 4.0 - 0.5 * dt

    return SpectrumTable(
        params=params,
        truncation_n=N,
        ground_energy=ground,
        energies_plus=energies_plus,
        energies_minus=energies_minus,
        zeta=zeta,
        chi=chi,
        eps=eps,
        mu_plus=mu_plus,
        mu_minus=mu_minus,
        zeta_sign=zeta_sign,
    )


def asymptotic_energy(params: ModelParams, n: int, branch: int) -> float:
    """Large-n asymptotic doublet energy; diagnostic only (intended n >= 50).

    Note the printed large-n form carries a doubled interaction term relative
    to a direct reduction of the 2x2 blocks (it equals block mean +/- 2 chi_n),
    so it tracks the branch gap, not the absolute levels; see the tests.
    """
    if branch not in (+1, -1):
        raise ValueError("branch must be +1 or -1")
    x, omega, delta = params.x, params.omega, params.delta
    if x <= 0:
        raise ValueError("asymptotic form needs x > 0")
    base = omega * (n + branch - 0.5 - x / 4.0)
    corr = (delta / math.sqrt(math.pi)) * (n * x) ** (-0.25) * math.cos(
        2.0 * math.sqrt(n * x) - math.pi / 4.0)
    return base - branch * corr


def default_truncation(alpha: complex, params: ModelParams) -> int:
    """Poisson-tail heuristic for the doublet truncation before auto-raising."""
    q = abs(alpha) ** 2 + params.x / 4.0
    return int(math.ceil(q + 10.0 * math.sqrt(q + 1.0))) + 20
