"""Independent truncated-number-basis ground truth.

Everything here deliberately avoids the analytic machinery of the other
modules: displacement operators come from a dense matrix exponential, the full
Hamiltonian is diagonalized numerically, and moments/entropies are plain
traces.  It exists to cross-validate the block-diagonalized evolution and the
closed-form phase-space routes, not to serve as a compute path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, expm

from .dynamics import InitialStateSpec, ModeAmplitudes
from .model import ModelParams


@dataclass(frozen=True)
class FockMatrix:
    """Dense Hermitian matrix in the number basis (oscillator density here)."""

    dim: int
    entries: np.ndarray

    def trace(self) -> float:
        return float(np.real(np.trace(self.entries)))

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))


def lowering_operator(dim: int) -> np.ndarray:
    a = np.zeros((dim, dim))
    idx = np.arange(1, dim)
    a[idx - 1, idx] = np.sqrt(idx)
    return a


def displacement_matrix(gamma: complex, dim: int) -> np.ndarray:
    """exp(gamma a^dag - gamma* a) by dense matrix exponential."""
    a = lowering_operator(dim)
    return expm(gamma * a.T.conj() - np.conj(gamma) * a)


def coherent_vector(alpha: complex, dim: int) -> np.ndarray:
    v = np.empty(dim, dtype=complex)
    v[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, dim):
        v[n] = v[n - 1] * alpha / math.sqrt(n)
    return v


def oracle_dimension(modes_or_n, x: float) -> int:
    """Default truncation margin: displacement spreads Poisson tails by O(sqrt x)."""
    n = modes_or_n if isinstance(modes_or_n, int) else len(modes_or_n.a)
    return int(math.ceil(n + 12.0 * math.sqrt(x) + 40))


class TruncationWarning(RuntimeError):
    pass


def displaced_to_fock(modes: ModeAmplitudes, dim: int | None = None) -> FockMatrix:
    """rho_mn = <m|rho_O|n> from the branch amplitudes.

    The two displaced branches are mapped into the number basis with dense
    displacement matrices; a trace deficit beyond 1e-6 flags under-truncation.
    """
    g = modes.params.g
    u, v = modes.branch_vectors()
    if dim is None:
        dim = oracle_dimension(len(u), modes.params.x)
    if dim < len(u):
        raise ValueError("oracle dimension smaller than the state truncation")
    pad_u = np.zeros(dim, dtype=complex)
    pad_u[: len(u)] = u
    pad_v = np.zeros(dim, dtype=complex)
    pad_v[: len(v)] = v
    psi_plus = displacement_matrix(-g, dim) @ pad_u   # |m_+> = D(-g)|m>
    psi_minus = displacement_matrix(+g, dim) @ pad_v
    rho = np.outer(psi_plus, psi_plus.conj()) + np.outer(psi_minus, psi_minus.conj())
    out = FockMatrix(dim=dim, entries=rho)
    if abs(out.trace() - (1.0 - modes.norm_tail)) > 1e-6:
        raise TruncationWarning(
            f"trace deficit {abs(out.trace() - 1.0):.2e} flags under-truncation")
    return out


def rabi_hamiltonian(params: ModelParams, dim: int) -> np.ndarray:
    """H = omega a^dag a + (Delta/2) sigma_x + lambda sigma_z (a + a^dag),
    ordered qubit (slow index: +1 block first) x oscillator."""
    a = lowering_operator(dim)
    num = a.T @ a
    y = a + a.T
    eye = np.eye(dim)
    sz = np.array([[1.0, 0.0], [0.0, -1.0]])
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    return (params.omega * np.kron(np.eye(2), num)
            + 0.5 * params.delta * np.kron(sx, eye)
            + params.lam * np.kron(sz, y))


def initial_fock_state(spec: InitialStateSpec, dim: int) -> np.ndarray:
    """|Psi(0)> in the qubit x number basis."""
    ca = coherent_vector(spec.alpha, dim)
    cma = coherent_vector(-spec.alpha, dim)
    psi = np.zeros(2 * dim, dtype=complex)
    if spec.kind == "coherent":
        psi[:dim] = ca
        return psi
    psi[:dim] = 0.5 * (ca + cma)
    psi[dim:] = 0.5 * spec.bell_sign * (ca - cma)
    return psi


def exact_evolve(params: ModelParams, spec: InitialStateSpec, dim: int, t: float,
                 check_convergence: bool = False) -> FockMatrix:
    """Numerically exact rho_O(t) by full diagonalization of the 2*dim matrix."""

    def _rho_at(d: int) -> np.ndarray:
        h = rabi_hamiltonian(params, d)
        evals, vecs = eigh(h)
        psi0 = initial_fock_state(
            InitialStateSpec(spec.alpha, spec.bell_sign, params, spec.kind), d)
        amp = vecs.conj().T @ psi0
        psit = vecs @ (np.exp(-1j * evals * t) * amp)
        up, down = psit[:d], psit[d:]
        return np.outer(up, up.conj()) + np.outer(down, down.conj())

    rho = _rho_at(dim)
    if check_convergence:
        ref = _rho_at(2 * dim)[:dim, :dim]
        if np.max(np.abs(ref - rho)) > 1e-8:
            raise TruncationWarning("doubling test failed; raise the oracle dimension")
    return FockMatrix(dim=dim, entries=rho)


def exact_spectrum(params: ModelParams, dim: int) -> np.ndarray:
    return eigh(rabi_hamiltonian(params, dim), eigvals_only=True)


def oracle_entropy(rho: FockMatrix) -> float:
    """-sum lam ln lam over eigenvalues clamped to [0, 1]."""
    evals = np.clip(np.linalg.eigvalsh(rho.entries), 0.0, 1.0)
    pos = evals[evals > 0.0]
    return float(-np.sum(pos * np.log(pos)))


def photon_trace_moments(rho: FockMatrix) -> tuple[float, float]:
    """(Tr rho n, Tr rho n^2 - (Tr rho n)^2)."""
    n = np.arange(rho.dim, dtype=float)
    diag = np.real(np.diag(rho.entries))
    mean = float(n @ diag)
    second = float((n ** 2) @ diag)
    return mean, second - mean ** 2


def husimi_point(rho: FockMatrix, beta: complex) -> float:
    """(1/pi) <beta|rho|beta> directly from the number-basis matrix."""
    cb = coherent_vector(beta, rho.dim)
    return float(np.real(cb.conj() @ rho.entries @ cb)) / math.pi


def sigma_z_exact(params: ModelParams, spec: InitialStateSpec, dim: int,
                  times: np.ndarray) -> np.ndarray:
    """<sigma_z>(t) from the exact evolution, for GRWA regression guards."""
    h = rabi_hamiltonian(params, dim)
    evals, vecs = eigh(h)
    psi0 = initial_fock_state(spec, dim)
    amp = vecs.conj().T @ psi0
    out = np.empty(len(times))
    for i, t in enumerate(times):
        psit = vecs @ (np.exp(-1j * evals * t) * amp)
        out[i] = float(np.sum(np.abs(psit[:dim]) ** 2) - np.sum(np.abs(psit[dim:]) ** 2))
    return out
