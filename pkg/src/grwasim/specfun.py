"""Special functions for the displaced-oscillator eigenproblem.

Associated Laguerre polynomials by stable upward recurrence, the terminating
Charlier-type 2F0 kernel, the Kummer confluent hypergeometric 1F1, and the
overlap matrix elements between oppositely displaced number states and between
displaced number states and displaced Fock (coherent-excited) states.

All factorial ratios go through log-gamma so indices of a few hundred are safe.
Everything here is a pure function of its arguments; tables are plain immutable
arrays and can be shared freely across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class ConvergenceError(RuntimeError):
    """A series failed its tail bound; the argument is outside the contract."""


def log_factorial(n: int) -> float:
    return math.lgamma(n + 1.0)


# ----------------------------------------------------------------------------
# Associated Laguerre polynomials
# ----------------------------------------------------------------------------

def laguerre(n: int, j: int, x: float) -> float:
    """L_n^{(j)}(x) by upward three-term recurrence in n.

    The alternating finite sum loses all precision for x ~ 40, n ~ 50; the
    recurrence is stable for x >= 0.
    """
    if n < 0 or j < 0:
        raise ValueError("laguerre requires n >= 0 and j >= 0")
    if x < 0:
        raise ValueError("laguerre requires x >= 0")
    if n == 0:
        return 1.0
    prev = 1.0
    cur = 1.0 + j - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + j + 1 - x) * cur - (k + j) * prev) / (k + 1)
    return cur


def laguerre_row(nmax: int, j: int, x) -> np.ndarray:
    """L_0^{(j)}(x) .. L_nmax^{(j)}(x); x may be a scalar or an ndarray.

    Returns shape (nmax+1,) + shape(x).
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = 1.0
    if nmax == 0:
        return out
    out[1] = 1.0 + j - x
    for k in range(1, nmax):
        out[k + 1] = ((2 * k + j + 1 - x) * out[k] - (k + j) * out[k - 1]) / (k + 1)
    return out


@dataclass(frozen=True)
class LaguerreTable:
    """Table of L_n^{(j)}(x) for 0 <= n <= max_n, 0 <= j <= max_j at fixed x."""

    x: float
    max_n: int
    max_j: int
    values: np.ndarray  # shape (max_n+1, max_j+1)

    def recurrence_residual(self) -> float:
        """Max three-term-recurrence residual, normalised by max(1, |L_n^{(j)}|)."""
        worst = 0.0
        v = self.values
        for j in range(self.max_j + 1):
            for n in range(1, self.max_n):
                res = abs((n + 1) * v[n + 1, j] - (2 * n + j + 1 - self.x) * v[n, j]
                          + (n + j) * v[n - 1, j])
                worst = max(worst, res / max(1.0, abs(v[n, j])))
        return worst


def laguerre_table(x: float, max_n: int, max_j: int) -> LaguerreTable:
    if max_n < 0 or max_j < 0:
        raise ValueError("table bounds must be nonnegative")
    if x < 0:
        raise ValueError("laguerre_table requires x >= 0")
    vals = np.empty((max_n + 1, max_j + 1))
    for j in range(max_j + 1):
        vals[:, j] = laguerre_row(max_n, j, x)
    return LaguerreTable(x=x, max_n=max_n, max_j=max_j, values=vals)


# ----------------------------------------------------------------------------
# Terminating 2F0 (Charlier kernel)
# ----------------------------------------------------------------------------

def charlier_kernel(n: int, m: int, tau: float) -> float:
    """2F0(-n, -m; ; -1/tau) as the terminating sum of min(n, m)+1 terms.

    Symmetric in (n, m). Only the terminating reading of 2F0 is implemented;
    tau <= 0 is rejected (consumers remove the tau -> 0 limit algebraically).
    """
    if n < 0 or m < 0:
        raise ValueError("charlier_kernel requires n, m >= 0")
    if tau <= 0:
        raise ValueError("charlier_kernel requires tau > 0")
    kmax = min(n, m)
    term = 1.0
    terms = [term]
    for k in range(kmax):
        term *= -((n - k) * (m - k)) / ((k + 1) * tau)
        terms.append(term)
    return math.fsum(terms)


# ----------------------------------------------------------------------------
# Kummer 1F1
# ----------------------------------------------------------------------------

_KUMMER_MAX_TERMS = 10_000
_KUMMER_TAIL = 1e-14


def _is_nonpositive_integer(a: float) -> bool:
    return a <= 1e-12 and abs(a - round(a)) < 1e-12


def kummer_1f1(a: float, b: float, z: float) -> float:
    """1F1(a; b; z) for the call sites b in {1/2, 3/2}, a <= 0, z <= 0.

    Nonpositive-integer a terminates exactly. Otherwise the Kummer
    transformation 1F1(a;b;z) = e^z 1F1(b-a;b;-z) turns z <= 0 into an
    all-positive-term series summed to relative tail < 1e-14.
    """
    if b <= 0:
        raise ValueError("kummer_1f1 requires b > 0")
    if z == 0.0:
        return 1.0
    if _is_nonpositive_integer(a):
        nterms = int(round(-a))
        term = 1.0
        acc = [term]
        for k in range(nterms):
            term *= (a + k) * z / ((b + k) * (k + 1))
            acc.append(term)
        return math.fsum(acc)
    if z < 0:
        return math.exp(z) * _kummer_series_positive(b - a, b, -z)
    return _kummer_series_positive(a, b, z)


def _kummer_series_positive(a: float, b: float, z: float) -> float:
    # All-positive terms when a > 0, b > 0, z >= 0.
    term = 1.0
    total = 1.0
    for k in range(_KUMMER_MAX_TERMS):
        term *= (a + k) * z / ((b + k) * (k + 1))
        total += term
        if term < _KUMMER_TAIL * total:
            return total
    raise ConvergenceError("1F1 series failed its tail bound after 1e4 terms")


def kummer_1f1_vec(a: float, b: float, z: np.ndarray) -> np.ndarray:
    """Vectorised kummer_1f1 over an array of z <= 0 at fixed (a, b)."""
    z = np.asarray(z, dtype=float)
    if np.any(z > 0):
        raise ValueError("kummer_1f1_vec expects z <= 0")
    if _is_nonpositive_integer(a):
        nterms = int(round(-a))
        term = np.ones_like(z)
        total = np.ones_like(z)
        for k in range(nterms):
            term = term * ((a + k) / ((b + k) * (k + 1))) * z
            total += term
        return total
    ap, zp = b - a, -z
    term = np.ones_like(zp)
    total = np.ones_like(zp)
    for k in range(_KUMMER_MAX_TERMS):
        term = term * ((ap + k) / ((b + k) * (k + 1))) * zp
        total += term
        if np.all(term < _KUMMER_TAIL * total):
            return np.exp(z) * total
    raise ConvergenceError("1F1 series failed its tail bound after 1e4 terms")


# ----------------------------------------------------------------------------
# Displaced-number overlaps M_{m,n} = <m_-|n_+>
# ----------------------------------------------------------------------------

def displaced_overlap(m: int, n: int, x: float) -> float:
    """Overlap of oppositely displaced number states at dimensionless coupling x.

    Two-branch Laguerre form; the factorial ratio is evaluated in log space so
    indices up to a few hundred do not overflow.
    """
    if m < 0 or n < 0:
        raise ValueError("displaced_overlap requires m, n >= 0")
    if x < 0:
        raise ValueError("displaced_overlap requires x >= 0")
    if x == 0.0:
        return 1.0 if m == n else 0.0
    p, d = min(m, n), abs(m - n)
    logmag = 0.5 * d * math.log(x) - 0.5 * x + 0.5 * (log_factorial(p) - log_factorial(p + d))
    val = math.exp(logmag) * laguerre(p, d, x)
    return val if m < n else ((-1) ** d) * val


def displaced_overlap_table(nmax: int, x: float) -> np.ndarray:
    """Dense (nmax+1, nmax+1) table of M_{m,n}, built one diagonal at a time."""
    if x < 0:
        raise ValueError("displaced_overlap_table requires x >= 0")
    size = nmax + 1
    if x == 0.0:
        return np.eye(size)
    out = np.empty((size, size))
    lg = np.array([log_factorial(k) for k in range(size)])
    for d in range(size):
        p = np.arange(size - d)
        lag = laguerre_row(size - d - 1, d, x)  # L_p^{(d)}(x), p = 0..size-d-1
        mag = np.exp(0.5 * d * math.log(x) - 0.5 * x + 0.5 * (lg[p] - lg[p + d])) * lag
        idx = np.arange(size - d)
        out[idx, idx + d] = mag                      # m < n branch (m = p, n = p + d)
        out[idx + d, idx] = ((-1) ** d) * mag        # m > n branch
    return out


# ----------------------------------------------------------------------------
# Displaced-Fock matrix elements and coherent-displaced overlaps
# ----------------------------------------------------------------------------

def displaced_fock_matrix(gamma: complex, kmax: int, nmax: int) -> np.ndarray:
    """T[k, n] = <k|D(gamma)|n> for 0 <= k <= kmax, 0 <= n <= nmax.

    Evaluated one index-difference diagonal at a time through the Laguerre
    form  <p+d|D|p> = sqrt(p!/(p+d)!) gamma^d e^{-y/2} L_p^{(d)}(y), y=|gamma|^2,
    with the Gaussian folded into the recurrence seeds and the prefactor
    magnitude in log space.  (A raising recurrence in k follows a subdominant
    solution and amplifies rounding noise by ~e^{y} once k >> y, which is why
    it is not used.)
    """
    if kmax < 0 or nmax < 0:
        raise ValueError("matrix bounds must be nonnegative")
    gamma = complex(gamma)
    y = abs(gamma) ** 2
    T = np.zeros((kmax + 1, nmax + 1), dtype=complex)
    if y == 0.0:
        np.fill_diagonal(T, 1.0)
        return T
    log_r = math.log(abs(gamma))
    theta = math.atan2(gamma.imag, gamma.real)
    lg = np.array([math.lgamma(j + 1.0) for j in range(max(kmax, nmax) + 2)])
    pmax_all = min(kmax, nmax)

    # e^{-y/2} L_p^{(d)}(y) for all needed (p, d) via the scaled recurrence
    def _filled(dvals: np.ndarray, pmax: int) -> np.ndarray:
        out = np.empty((pmax + 1, len(dvals)))
        gauss = math.exp(-0.5 * y) if y < 1400.0 else 0.0
        out[0] = gauss
        if pmax >= 1:
            out[1] = (1.0 + dvals - y) * gauss
            for p in range(1, pmax):
                out[p + 1] = ((2 * p + dvals + 1 - y) * out[p]
                              - (p + dvals) * out[p - 1]) / (p + 1)
        return out

    # upper-left direction: k = p + d, n = p (d >= 0)
    dvals = np.arange(0, kmax + 1)
    lag = _filled(dvals, pmax_all)
    for p in range(pmax_all + 1):
        d = dvals[: kmax + 1 - p]
        mag = np.exp(0.5 * (lg[p] - lg[p + d]) + d * log_r)
        phase = np.exp(1j * theta * d)
        T[p + d, p] = mag * phase * lag[p, : len(d)]
    # lower-right: n = p + d, k = p (d >= 1); <k|D|n> = conj(<n|D(-gamma)|k>)
    dvals = np.arange(1, nmax + 1)
    if len(dvals):
        lag = _filled(dvals, pmax_all)
        for p in range(pmax_all + 1):
            d = dvals[: nmax - p]
            if len(d) == 0:
                continue
            mag = np.exp(0.5 * (lg[p] - lg[p + d]) + d * log_r)
            phase = np.exp(-1j * (theta + math.pi) * d)   # (-gamma*)^d / |gamma|^d
            T[p, p + d] = mag * phase * lag[p, : len(d)]
    return T


def coherent_displaced_overlap(n: int, sign: int, alpha: complex, k: int, params) -> complex:
    """<n_sign | alpha, k>: displaced number state against a displaced Fock state.

    |alpha, k> = D(alpha)|k>.  The phase factor is e^{-sign * i * phi_alpha}
    with phi_alpha = (lambda/omega) Im(alpha); the modulus part is the
    pole-free finite sum, evaluated through the stable recurrence.
    """
    if n < 0 or k < 0:
        raise ValueError("coherent_displaced_overlap requires n, k >= 0")
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    g = params.g
    phi = g * alpha.imag
    shifted = alpha + sign * g
    elem = displaced_fock_matrix(shifted, n, k)[n, k]
    return elem * complex(math.cos(sign * phi), -math.sin(sign * phi))
