"""Initial-state expansion and time evolution in the block eigenbasis.

The hybrid Bell states

    |Psi(0)>_(+/-) = (1/2)[ |1>(|alpha> + |-alpha>) +/- |-1>(|alpha> - |-alpha>) ]

are expanded over the eigenbasis {|E_0>, |E_n^(+/-)>}; time evolution is then a
pure phase per coefficient.  Mode amplitudes A_n(t), B_n(t) recombine the
doublet coefficients back onto the adiabatic basis, and the derived branch
vectors (u, v) collect the state as

    |Psi(t)> = sum_m [ u_m |1, m_+> + v_m |-1, m_-> ],

which is what the reduced densities and every phase-space quantity consume.

Phase arguments reach ~1e9 for the kitten-regime times, where a naive double
product/mod loses ~8 digits; phases are therefore reduced mod 2*pi in
double-double arithmetic (Veltkamp-split two-products).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ModelParams, SpectrumTable, build_spectrum, default_truncation

NORM_TAIL_TARGET = 1e-10
HARD_CAP = 4096


class TruncationError(RuntimeError):
    """Truncation would exceed the hard cap; parameters are outside desk scale."""


@dataclass(frozen=True)
class InitialStateSpec:
    """Hybrid Bell initial state (or the single-coherent variant used in tests)."""

    alpha: complex
    bell_sign: int
    params: ModelParams
    kind: str = "bell"  # "bell" | "coherent" (qubit-up x |alpha>, unit-test helper)

    def __post_init__(self):
        if self.bell_sign not in (+1, -1):
            raise ValueError("bell_sign must be +1 or -1")
        if self.kind not in ("bell", "coherent"):
            raise ValueError("kind must be 'bell' or 'coherent'")


@dataclass(frozen=True)
class StateCoefficients:
    c0: complex
    c_plus: np.ndarray   # C_n^(+), n = 1..N
    c_minus: np.ndarray  # C_n^(-), n = 1..N
    spectrum: SpectrumTable
    norm_tail: float
    spec: InitialStateSpec

    @property
    def truncation_n(self) -> int:
        return self.spectrum.truncation_n


@dataclass(frozen=True)
class ModeAmplitudes:
    """A_n(t), B_n(t) and C_0(t); moduli are preserved exactly by evolution."""

    t: float
    a: np.ndarray
    b: np.ndarray
    c0t: complex
    spectrum: SpectrumTable
    norm_tail: float
    alpha: complex = 0.0 + 0.0j  # initial coherent amplitude, for grid extents

    @property
    def params(self) -> ModelParams:
        return self.spectrum.params

    def branch_vectors(self) -> tuple[np.ndarray, np.ndarray]:
        """(u, v), length N+1: u_m = (A_{m+1} + Bt_m)/sqrt2, v_m = (A_{m+1} - Bt_m)/sqrt2,
        with Bt_0 = C_0(t) and Bt_m = B_m(t)."""
        at = np.concatenate([self.a, [0.0 + 0.0j]])
        bt = np.concatenate([[self.c0t], self.b])
        inv = 1.0 / math.sqrt(2.0)
        return (at + bt) * inv, (at - bt) * inv


def _coherent_weights(gamma: complex, nmax: int) -> np.ndarray:
    """w_m = e^{-|gamma|^2/2} gamma^m / sqrt(m!), m = 0..nmax, built stably."""
    w = np.empty(nmax + 1, dtype=complex)
    w[0] = math.exp(-0.5 * abs(gamma) ** 2)
    for m in range(1, nmax + 1):
        w[m] = w[m - 1] * gamma / math.sqrt(m)
    return w


def _bell_coefficients(spec: InitialStateSpec, spectrum: SpectrumTable):
    params = spec.params
    g = params.g
    sigma = spec.bell_sign
    alpha = complex(spec.alpha)
    a_plus = alpha + g
    a_minus = alpha - g
    phi = g * alpha.imag
    N = spectrum.truncation_n
    inv_sqrt2 = 1.0 / math.sqrt(2.0)

    # e^{-|a+|^2/2 - i phi} a_+^{n-1}/sqrt((n-1)!) and the a_- partner, n-1 = 0..N-1
    wp = _coherent_weights(a_plus, N - 1) * complex(math.cos(phi), -math.sin(phi))
    wm = _coherent_weights(a_minus, N - 1) * complex(math.cos(phi), math.sin(phi))

    m = np.arange(N)                      # n - 1
    parity_even = ((1.0 + (-1.0) ** m) / 2.0)   # P^(+)_{n-1}
    parity_odd = ((1.0 - (-1.0) ** m) / 2.0)    # P^(-)_{n-1}
    # bell "-": a_+ bracket carries P^(+)_{n-1}, a_- enters with -1 and P^(-)_{n-1};
    # bell "+": projectors swap and the a_- bracket enters with +1.
    proj_p = parity_even if sigma == -1 else parity_odd
    proj_m = parity_odd if sigma == -1 else parity_even

    mu_p, mu_m = spectrum.mu_plus, spectrum.mu_minus
    s = spectrum.zeta_sign
    root_n = np.sqrt(np.arange(1, N + 1, dtype=float))

    bra_p_plus = mu_p + (a_plus / root_n) * s * mu_m    # with C^(+): mu^(+) + (a+/sqrt n) s mu^(-)
    bra_p_minus = mu_m - (a_plus / root_n) * s * mu_p   # with C^(-)
    bra_m_plus = mu_p - (a_minus / root_n) * s * mu_m
    bra_m_minus = mu_m + (a_minus / root_n) * s * mu_p

    c_plus = inv_sqrt2 * (wp * proj_p * bra_p_plus + sigma * wm * proj_m * bra_m_plus)
    c_minus = inv_sqrt2 * (wp * proj_p * bra_p_minus + sigma * wm * proj_m * bra_m_minus)
    if sigma == -1:
        c0 = inv_sqrt2 * math.exp(-0.5 * abs(a_minus) ** 2) * complex(math.cos(phi), math.sin(phi))
    else:
        c0 = inv_sqrt2 * math.exp(-0.5 * abs(a_plus) ** 2) * complex(math.cos(phi), -math.sin(phi))
    return c0, c_plus, c_minus


def _coherent_coefficients(spec: InitialStateSpec, spectrum: SpectrumTable):
    # |Psi(0)> = |1> x |alpha>: projections are (1/sqrt2)<m_+|alpha>.
    params = spec.params
    g = params.g
    alpha = complex(spec.alpha)
    phi = g * alpha.imag
    N = spectrum.truncation_n
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    w = _coherent_weights(alpha + g, N) * complex(math.cos(phi), -math.sin(phi))
    mu_p, mu_m, s = spectrum.mu_plus, spectrum.mu_minus, spectrum.zeta_sign
    c0 = inv_sqrt2 * w[0]
    c_plus = inv_sqrt2 * (mu_p * w[:-1] + s * mu_m * w[1:])
    c_minus = inv_sqrt2 * (mu_m * w[:-1] - s * mu_p * w[1:])
    return c0, c_plus, c_minus


def initial_coefficients(spec: InitialStateSpec,
                         spectrum: SpectrumTable | None = None,
                         norm_tail_target: float = NORM_TAIL_TARGET,
                         hard_cap: int = HARD_CAP) -> StateCoefficients:
    """Expand the initial state, raising the truncation until the norm tail
    drops below `norm_tail_target` (hard cap -> TruncationError)."""
    builder = _bell_coefficients if spec.kind == "bell" else _coherent_coefficients
    N = spectrum.truncation_n if spectrum is not None \
        else min(default_truncation(spec.alpha, spec.params), hard_cap)
    while True:
        table = spectrum if (spectrum is not None and spectrum.truncation_n == N) \
            else build_spectrum(spec.params, N)
        c0, c_plus, c_minus = builder(spec, table)
        total = abs(c0) ** 2 + np.sum(np.abs(c_plus) ** 2) + np.sum(np.abs(c_minus) ** 2)
        tail = 1.0 - total
        if tail <= norm_tail_target:
            return StateCoefficients(c0=c0, c_plus=c_plus, c_minus=c_minus,
                                     spectrum=table, norm_tail=max(tail, 0.0), spec=spec)
        if N >= hard_cap:
            raise TruncationError(
                f"norm tail {tail:.3e} still above {norm_tail_target:.1e} at N = {N}")
        N = min(hard_cap, max(N + 16, int(1.3 * N)))


# ----------------------------------------------------------------------------
# Extended-precision phase reduction
# ----------------------------------------------------------------------------

_SPLIT = 134217729.0                 # 2**27 + 1
_TWO_PI_HI = 6.283185307179586
_TWO_PI_LO = 2.4492935982947064e-16  # 2*pi - _TWO_PI_HI


def _two_prod(a, b):
    """Exact product a*b = p + err via Veltkamp splitting (no FMA needed)."""
    p = a * b
    aa = _SPLIT * a
    a_hi = aa - (aa - a)
    a_lo = a - a_hi
    bb = _SPLIT * b
    b_hi = bb - (bb - b)
    b_lo = b - b_hi
    err = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
    return p, err


def reduce_phase(energy, t: float):
    """(energy * t) mod 2*pi in double-double, exact w.r.t. the stored doubles.

    Accepts scalars or arrays; the result lies within ~1 ulp of the true
    reduced phase even for |energy * t| ~ 1e9.
    """
    e = np.asarray(energy, dtype=float)
    p, err = _two_prod(e, float(t))
    k = np.round(p / _TWO_PI_HI)
    k_hi, k_err = _two_prod(k, _TWO_PI_HI)
    r = (p - k_hi) - k_err - k * _TWO_PI_LO + err
    # One wrap correction keeps the result in [-pi, pi].
    r = r - _TWO_PI_HI * np.round(r / _TWO_PI_HI)
    return r


def _phase_factor(energy, t):
    r = reduce_phase(energy, t)
    return np.cos(r) - 1j * np.sin(r)


def amplitudes_at(coeffs: StateCoefficients, t: float) -> ModeAmplitudes:
    """Apply e^{-i E t} phases and mix doublets into A_n(t), B_n(t)."""
    sp = coeffs.spectrum
    c0t = coeffs.c0 * complex(_phase_factor(sp.ground_energy, t))
    cp = coeffs.c_plus * _phase_factor(sp.energies_plus, t)
    cm = coeffs.c_minus * _phase_factor(sp.energies_minus, t)
    a = sp.mu_plus * cp + sp.mu_minus * cm
    b = sp.zeta_sign * (sp.mu_minus * cp - sp.mu_plus * cm)
    return ModeAmplitudes(t=float(t), a=a, b=b, c0t=c0t,
                          spectrum=sp, norm_tail=coeffs.norm_tail,
                          alpha=complex(coeffs.spec.alpha))
