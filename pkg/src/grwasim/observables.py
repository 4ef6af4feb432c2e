"""Scalar measures over time and their estimators.

Grid-based measures (Wehrl entropy, Wigner entropy, negativity volume) are
midpoint-rule integrals over PhaseGrid values with the 0*log(0) := 0
convention and natural logarithms throughout.  The analytic quadrature and
photon-number moments come from the six Fourier-mode sums G_k, N_k, F_k of the
mode amplitudes; the fock-oracle traces are their ground truth.

Timescale estimators follow the plotted-data procedures: the entropy
production time is the first crossing of the window-averaged Wehrl entropy,
and the long quasi-period is the dominant autocorrelation peak with quadratic
interpolation.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .density import qubit_density, population_inversion, von_neumann_entropy
from .dynamics import ModeAmplitudes, StateCoefficients, amplitudes_at
from .phasespace import PhaseGrid, grid
from .specfun import displaced_overlap_table


class EstimatorError(RuntimeError):
    """A series estimator could not produce a value (no crossing / aperiodic)."""


@dataclass(frozen=True)
class ObservableSeries:
    times: np.ndarray
    values: np.ndarray
    label: str
    params_digest: str = ""

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ValueError("times and values must have equal length")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("series values must be finite")


@dataclass(frozen=True)
class MomentSet:
    g1: complex
    g2: complex
    n1: float
    n2: float
    f1: complex
    f2: complex


def moment_set(modes: ModeAmplitudes) -> MomentSet:
    """The six Fourier-mode sums over the amplitudes, truncated at the state's N."""
    a, b, c0 = modes.a, modes.b, modes.c0t
    N = len(a)
    n = np.arange(1, N + 1, dtype=float)

    def _g(k: int) -> complex:
        poch_a = np.prod([n + i for i in range(k)], axis=0)        # (n)_k
        poch_b = np.prod([n + 1 + i for i in range(k)], axis=0)    # (n+1)_k
        out = math.sqrt(k) * np.conj(c0) * b[k - 1]
        out += np.sum(np.sqrt(poch_a[:N - k]) * np.conj(a[:N - k]) * a[k:])
        out += np.sum(np.sqrt(poch_b[:N - k]) * np.conj(b[:N - k]) * b[k:])
        return complex(out)

    def _n(k: int) -> float:
        return float(abs(c0) ** 2
                     + np.sum(n ** k * np.abs(a) ** 2)
                     + np.sum((n + 1.0) ** k * np.abs(b) ** 2))

    def _f(k: int) -> complex:
        out = k * np.conj(c0) * (a[1] if N > 1 else 0.0)
        poch_a = np.prod([n + 1 + i for i in range(k - 1)], axis=0) if k > 1 else np.ones(N)
        poch_b = np.prod([n + 2 + i for i in range(k - 1)], axis=0) if k > 1 else np.ones(N)
        out += np.sum(np.sqrt(n) * poch_a * np.conj(a) * b)
        out += np.sum(np.sqrt(n[:N - 2] + 1.0) * poch_b[:N - 2] * np.conj(b[:N - 2]) * a[2:])
        return complex(out)

    return MomentSet(g1=_g(1), g2=_g(2), n1=_n(1), n2=_n(2), f1=_f(1), f2=_f(2))


def quadrature(modes: ModeAmplitudes, varrho: float, theta: float,
               moments: MomentSet | None = None) -> tuple[float, float, float]:
    """(<X_theta>, <X_theta^2>, V_theta) for the quadrature at angle theta."""
    ms = moments if moments is not None else moment_set(modes)
    x = modes.params.x
    rx = math.sqrt(x)
    e1 = complex(math.cos(theta), -math.sin(theta))
    e2 = e1 * e1
    mean = (ms.g1 * e1).real - rx * varrho * math.cos(theta)
    second = (0.5 * (ms.g2 * e2 - rx * ms.f1 * (1.0 + e2)).real
              + 0.5 * (ms.n1 - 0.5) + 0.25 * x * math.cos(theta) ** 2)
    return mean, second, second - mean * mean


def quadrature_min(modes: ModeAmplitudes, varrho: float,
                   ngrid: int = 1440) -> tuple[float, float]:
    """(min_theta V_theta, argmin in radians) by grid search plus parabolic refine."""
    ms = moment_set(modes)
    thetas = 2.0 * math.pi * np.arange(ngrid) / ngrid
    vals = np.array([quadrature(modes, varrho, th, ms)[2] for th in thetas])
    i0 = int(np.argmin(vals))
    ip, im = (i0 + 1) % ngrid, (i0 - 1) % ngrid
    denom = vals[im] - 2.0 * vals[i0] + vals[ip]
    off = 0.5 * (vals[im] - vals[ip]) / denom if denom != 0 else 0.0
    th = thetas[i0] + off * (2.0 * math.pi / ngrid)
    return quadrature(modes, varrho, th, ms)[2], th % (2.0 * math.pi)


def photon_stats(modes: ModeAmplitudes,
                 moments: MomentSet | None = None) -> tuple[float, float, float]:
    """(<n>, <(Delta n)^2>, Q_M); the Mandel parameter is NaN when <n> vanishes."""
    ms = moments if moments is not None else moment_set(modes)
    x = modes.params.x
    rx = math.sqrt(x)
    mean = ms.n1 + 0.25 * x - rx * ms.f1.real - 1.0
    bracket = ms.n1 - rx * ms.f1.real
    var = (ms.n2 + 0.5 * x * (ms.n1 + ms.g2.real - 0.5)
           + rx * (ms.f1.real - 2.0 * ms.f2.real) - bracket * bracket)
    mandel = var / mean - 1.0 if mean > 1e-12 else math.nan
    return mean, var, mandel


# ----------------------------------------------------------------------------
# Grid functionals
# ----------------------------------------------------------------------------

def _neg_xlogx(v: np.ndarray) -> np.ndarray:
    out = np.zeros_like(v)
    mask = v > 0.0
    out[mask] = -v[mask] * np.log(v[mask])
    return out


def wehrl_entropy(g: PhaseGrid) -> float:
    """-int Q ln Q d^2beta (natural log, 0 ln 0 := 0)."""
    if g.kind != "husimi":
        raise ValueError("wehrl_entropy needs a husimi grid")
    return float(np.sum(_neg_xlogx(g.values))) * g.cell_area


def wigner_entropy(g: PhaseGrid) -> float:
    """-int |W| ln |W| d^2beta."""
    if g.kind != "wigner":
        raise ValueError("wigner_entropy needs a wigner grid")
    return float(np.sum(_neg_xlogx(np.abs(g.values)))) * g.cell_area


def negativity(g: PhaseGrid) -> float:
    """delta_W = int |W| d^2beta - 1, floored at 0."""
    if g.kind != "wigner":
        raise ValueError("negativity needs a wigner grid")
    return max(float(np.sum(np.abs(g.values))) * g.cell_area - 1.0, 0.0)


# ----------------------------------------------------------------------------
# Series construction
# ----------------------------------------------------------------------------

_MEASURES = ("sigma_z", "entropy", "wehrl", "wigner_entropy", "negativity",
             "variance_min", "mandel", "photon_mean", "photon_var")

_STATE: dict = {}


def _series_init(coeffs, grid_cfg, measures, overlaps):
    _STATE["coeffs"] = coeffs
    _STATE["grid_cfg"] = grid_cfg
    _STATE["measures"] = measures
    _STATE["overlaps"] = overlaps


def _measures_at(t: float) -> dict[str, float]:
    coeffs = _STATE["coeffs"]
    extent, resolution = _STATE["grid_cfg"]
    measures = _STATE["measures"]
    overlaps = _STATE["overlaps"]
    modes = amplitudes_at(coeffs, t)
    out: dict[str, float] = {}
    q = None
    if {"sigma_z", "entropy", "variance_min"} & set(measures):
        q = qubit_density(modes, overlaps)
    if "sigma_z" in measures:
        out["sigma_z"] = population_inversion(q)
    if "entropy" in measures:
        out["entropy"] = von_neumann_entropy(q)
    if "variance_min" in measures:
        out["variance_min"] = quadrature_min(modes, q.varrho)[0]
    if {"mandel", "photon_mean", "photon_var"} & set(measures):
        mean, var, mandel = photon_stats(modes)
        out.update({k: v for k, v in
                    (("photon_mean", mean), ("photon_var", var), ("mandel", mandel))
                    if k in measures})
    if "wehrl" in measures:
        gq = grid(modes, "husimi", extent=extent, resolution=resolution)
        out["wehrl"] = wehrl_entropy(gq)
    if {"wigner_entropy", "negativity"} & set(measures):
        gw = grid(modes, "wigner", extent=extent, resolution=resolution)
        if "wigner_entropy" in measures:
            out["wigner_entropy"] = wigner_entropy(gw)
        if "negativity" in measures:
            out["negativity"] = negativity(gw)
    return out


def build_series(coeffs: StateCoefficients, times, measures,
                 extent: float | None = None, resolution: int = 512,
                 workers: int = 1, progress=None,
                 done: dict[float, dict] | None = None) -> dict[str, ObservableSeries]:
    """Evaluate the requested measures over `times`, optionally in parallel.

    `done` maps already-computed times to their measure dicts (checkpoint
    resume); `progress(t, row)` is called as rows complete, in time order.
    """
    times = np.asarray(times, dtype=float)
    unknown = set(measures) - set(_MEASURES)
    if unknown:
        raise ValueError(f"unknown measures: {sorted(unknown)}")
    overlaps = None
    if {"sigma_z", "entropy", "variance_min"} & set(measures):
        u_len = coeffs.truncation_n + 1
        overlaps = displaced_overlap_table(u_len - 1, coeffs.spectrum.params.x)
    digest = params_digest(coeffs, grid_cfg=(extent, resolution))

    done = dict(done or {})
    pending = [t for t in times if t not in done]
    rows: dict[float, dict] = dict(done)
    if pending:
        if workers > 1:
            with ProcessPoolExecutor(
                    max_workers=workers, initializer=_series_init,
                    initargs=(coeffs, (extent, resolution), tuple(measures), overlaps)) as pool:
                for t, row in zip(pending, pool.map(_measures_at, pending, chunksize=4)):
                    rows[t] = row
                    if progress is not None:
                        progress(t, row)
        else:
            _series_init(coeffs, (extent, resolution), tuple(measures), overlaps)
            for t in pending:
                rows[t] = _measures_at(t)
                if progress is not None:
                    progress(t, rows[t])

    out = {}
    for m in measures:
        vals = np.array([rows[t][m] for t in times])
        out[m] = ObservableSeries(times=times, values=vals, label=m, params_digest=digest)
    return out


def params_digest(coeffs: StateCoefficients, grid_cfg=None) -> str:
    p = coeffs.spectrum.params
    s = coeffs.spec
    blob = json.dumps({"omega": p.omega, "delta": p.delta, "lambda": p.lam,
                       "alpha": [s.alpha.real, s.alpha.imag], "bell_sign": s.bell_sign,
                       "kind": s.kind, "N": coeffs.truncation_n,
                       "grid": list(grid_cfg) if grid_cfg else None}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


# ----------------------------------------------------------------------------
# Series estimators
# ----------------------------------------------------------------------------

def time_average(series: ObservableSeries, window: tuple[float, float]) -> float:
    """Trapezoidal mean of the series over [t0, t1]."""
    t0, t1 = window
    mask = (series.times >= t0) & (series.times <= t1)
    if np.count_nonzero(mask) < 2:
        raise ValueError("window selects fewer than two samples")
    t = series.times[mask]
    v = series.values[mask]
    return float(np.trapezoid(v, t) / (t[-1] - t[0]))


def entropy_production_time(series: ObservableSeries,
                            window: tuple[float, float] | None = None) -> float:
    """First time the series crosses its window-averaged value (rising)."""
    if window is None:
        window = (float(series.times[0]), float(series.times[-1]))
    mean = time_average(series, window)
    v, t = series.values, series.times
    below = v < mean
    for i in range(1, len(v)):
        if below[i - 1] and not below[i]:
            frac = (mean - v[i - 1]) / (v[i] - v[i - 1])
            return float(t[i - 1] + frac * (t[i] - t[i - 1]))
    raise EstimatorError("series never crosses its window average")


def long_period_estimate(series: ObservableSeries,
                         min_lag_fraction: float = 0.1,
                         max_lag_fraction: float = 0.6) -> float:
    """Dominant quasi-period from the unbiased autocorrelation peak.

    The signal is detrended by its mean; the highest autocorrelation local
    maximum inside the lag window is refined by parabolic interpolation.
    Unbiased normalization (dividing by the overlap length) avoids the
    taper shift ~T^2/(4 pi^2 L) of the biased estimate; the default lag
    window assumes the series covers about two periods, so the harmonic at
    2T falls outside it.
    """
    t, v = series.times, series.values
    if len(t) < 8:
        raise EstimatorError("series too short for a period estimate")
    dt = np.diff(t)
    if np.max(np.abs(dt - dt[0])) > 1e-9 * abs(dt[0]):
        raise EstimatorError("period estimator requires uniform sampling")
    x = v - np.mean(v)
    ac = np.correlate(x, x, mode="full")[len(x) - 1:]
    ac = ac / np.arange(len(x), 0, -1)
    lo = max(int(min_lag_fraction * len(x)), 2)
    hi = min(int(max_lag_fraction * len(x)), len(ac) - 2)
    if hi <= lo:
        raise EstimatorError("lag window is empty")
    seg = ac[lo:hi]
    i0 = int(np.argmax(seg)) + lo
    if ac[i0] <= 0 or not (ac[i0] >= ac[i0 - 1] and ac[i0] >= ac[i0 + 1]):
        raise EstimatorError("no dominant positive autocorrelation peak: aperiodic series")
    denom = ac[i0 - 1] - 2.0 * ac[i0] + ac[i0 + 1]
    off = 0.5 * (ac[i0 - 1] - ac[i0 + 1]) / denom if denom != 0 else 0.0
    return float((i0 + off) * dt[0])


def local_extrema_near(coeffs: StateCoefficients, center: float, halfwidth: float,
                       nsamples: int = 161, resolution: int = 128,
                       extent: float | None = None, workers: int = 1,
                       select: str = "nearest") -> tuple[float, float]:
    """(t_min, t_max): a Wehrl-entropy local minimum in
    [center-halfwidth, center+halfwidth] and the following local maximum.

    select="nearest" picks the minimum closest to `center`; select="deepest"
    picks the lowest one, which locates a revival dip robustly even when
    `center` (e.g. a fraction of an estimated quasi-period) is a few short
    periods off.
    """
    if select not in ("nearest", "deepest"):
        raise ValueError("select must be 'nearest' or 'deepest'")
    ts = np.linspace(center - halfwidth, center + halfwidth, nsamples)
    series = build_series(coeffs, ts, ["wehrl"], extent=extent,
                          resolution=resolution, workers=workers)["wehrl"]
    v = series.values
    minima = [i for i in range(1, len(v) - 1) if v[i] <= v[i - 1] and v[i] <= v[i + 1]]
    if not minima:
        raise EstimatorError("no local minimum in the scan window")
    if select == "nearest":
        i_min = min(minima, key=lambda i: abs(series.times[i] - center))
    else:
        i_min = min(minima, key=lambda i: v[i])
    maxima = [i for i in range(i_min + 1, len(v) - 1)
              if v[i] >= v[i - 1] and v[i] >= v[i + 1]]
    if not maxima:
        raise EstimatorError("no local maximum after the minimum in the scan window")
    i_max = maxima[0]
    return float(series.times[i_min]), float(series.times[i_max])
