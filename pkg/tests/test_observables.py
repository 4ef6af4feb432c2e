"""Moments, entropies, negativity, and the series estimators."""

import math

import numpy as np
import pytest

from grwasim import (InitialStateSpec, ModelParams, amplitudes_at,
                     initial_coefficients, qubit_density)
from grwasim import observables as obs
from grwasim import phasespace as ps


# ---------------------------------------------------------------- moments

def test_moment_sums_delta_zero_static():
    p = ModelParams(1.0, 0.0, 0.2)
    coeffs = initial_coefficients(InitialStateSpec(1.0 + 0j, -1, p))
    n1 = [obs.moment_set(amplitudes_at(coeffs, t)).n1 for t in (0.0, 13.0, 400.0)]
    assert max(n1) - min(n1) < 1e-12


def test_g1_no_adjacent_pairs():
    # a single nonzero A_n with all B = 0 contributes nothing to G_1
    p = ModelParams(1.0, 1.0, 0.1)
    coeffs = initial_coefficients(InitialStateSpec(0.5 + 0j, -1, p))
    m = amplitudes_at(coeffs, 0.0)
    a = np.zeros_like(m.a)
    a[3] = 0.7
    lone = type(m)(t=0.0, a=a, b=np.zeros_like(m.b), c0t=0.0, spectrum=m.spectrum,
                   norm_tail=0.0, alpha=m.alpha)
    ms = obs.moment_set(lone)
    assert ms.g1 == 0.0
    assert ms.f2 == 0.0


def test_moaccording_grid_integrals(snapshot_coeffs):
    # analytic first/second quadrature moments vs 2-D integrals of the Q grid
    m = amplitudes_at(snapshot_coeffs, 28.80)
    q = qubit_density(m)
    g = ps.grid(m, "husimi", resolution=512)
    ax = g.axis()
    X, Y = np.meshgrid(ax, ax)
    for theta in (0.0, 0.8, 2.4):
        xq = X * math.cos(theta) + Y * math.sin(theta)   # Re(beta e^{-i theta})
        mean_g = float(np.sum(xq * g.values)) * g.cell_area
        second_g = float(np.sum((xq ** 2 - 0.25) * g.values)) * g.cell_area
        mean_a, second_a, _ = obs.quadrature(m, q.varrho, theta)
        assert mean_a == pytest.approx(mean_g, abs=1e-4)
        assert second_a == pytest.approx(second_g, abs=1e-4)


def test_photon_moments_match_grid(snapshot_coeffs):
    # <n> = int (|beta|^2 - 1) Q via the antinormal correspondence
    m = amplitudes_at(snapshot_coeffs, 28.80)
    g = ps.grid(m, "husimi", resolution=512)
    ax = g.axis()
    X, Y = np.meshgrid(ax, ax)
    mean_g = float(np.sum((X ** 2 + Y ** 2 - 1.0) * g.values)) * g.cell_area
    mean, _, _ = obs.photon_stats(m)
    assert mean == pytest.approx(mean_g, abs=1e-4)


def test_quadrature_coherent_flat_quarter():
    p = ModelParams(1.0, 1.0, 0.1)
    coeffs = initial_coefficients(InitialStateSpec(1.2 + 0j, -1, p, kind="coherent"))
    m = amplitudes_at(coeffs, 0.0)
    q = qubit_density(m)
    for theta in np.linspace(0.0, 2 * math.pi, 9):
        _, _, v = obs.quadrature(m, q.varrho, float(theta))
        assert v == pytest.approx(0.25, abs=1e-9)


def test_quadrature_snapshot_minimum(snapshot_coeffs):
    m = amplitudes_at(snapshot_coeffs, 28.80)
    q = qubit_density(m)
    vmin, theta = obs.quadrature_min(m, q.varrho)
    assert vmin == pytest.approx(0.15967, abs=1e-3)
    assert math.degrees(theta) == pytest.approx(179.55, abs=0.5)


def test_variance_properties(snapshot_coeffs, rng):
    m = amplitudes_at(snapshot_coeffs, 11.0)
    q = qubit_density(m)
    ms = obs.moment_set(m)
    for theta in rng.uniform(0.0, 2 * math.pi, size=24):
        _, _, v = obs.quadrature(m, q.varrho, float(theta), ms)
        _, _, v2 = obs.quadrature(m, q.varrho, float(theta) + 2 * math.pi, ms)
        assert v >= 0.0
        assert v2 == pytest.approx(v, abs=1e-12)


def test_moment_set_weight_monotonicity(snapshot_coeffs, rng):
    # N1 >= |C0|^2 and N2 >= N1 - |C0|^2 (monotone weights), all finite
    for t in rng.uniform(0.0, 1e5, size=30):
        m = amplitudes_at(snapshot_coeffs, float(t))
        ms = obs.moment_set(m)
        c0sq = abs(m.c0t) ** 2
        assert ms.n1 >= c0sq
        assert ms.n2 >= ms.n1 - c0sq
        for val in (ms.g1, ms.g2, ms.f1, ms.f2, ms.n1, ms.n2):
            assert np.all(np.isfinite([np.real(val), np.imag(val)]))


def test_photon_stats_time_zero(cat_coeffs):
    mean, var, mandel = obs.photon_stats(amplitudes_at(cat_coeffs, 0.0))
    assert mean == pytest.approx(2.5 ** 2, abs=1e-8)
    assert mandel == pytest.approx(0.0, abs=1e-6)


def test_photon_stats_match_oracle(snapshot_coeffs, rng):
    from grwasim.fockoracle import displaced_to_fock, photon_trace_moments
    for t in rng.uniform(0.0, 300.0, size=20):
        m = amplitudes_at(snapshot_coeffs, float(t))
        mean, var, _ = obs.photon_stats(m)
        mean_o, var_o = photon_trace_moments(displaced_to_fock(m))
        assert mean == pytest.approx(mean_o, abs=1e-8)
        assert var == pytest.approx(var_o, abs=1e-8)


def test_mandel_undefined_flag():
    p = ModelParams(1.0, 0.0, 0.0)
    coeffs = initial_coefficients(InitialStateSpec(0.0 + 0j, -1, p, kind="coherent"))
    mean, _, mandel = obs.photon_stats(amplitudes_at(coeffs, 0.0))
    assert mean == pytest.approx(0.0, abs=1e-12)
    assert math.isnan(mandel)


# ---------------------------------------------------------------- grid functionals

def test_wehrl_entropy_values():
    p = ModelParams(1.0, 1.0, 0.05)
    single = initial_coefficients(InitialStateSpec(2.5 + 0j, -1, p, kind="coherent"))
    g1 = ps.grid(amplitudes_at(single, 0.0), "husimi", resolution=512)
    assert obs.wehrl_entropy(g1) == pytest.approx(1.0 + math.log(math.pi), abs=5e-3)
    mixture = initial_coefficients(InitialStateSpec(2.5 + 0j, -1, p))
    g2 = ps.grid(amplitudes_at(mixture, 0.0), "husimi", resolution=512)
    assert obs.wehrl_entropy(g2) == pytest.approx(1.0 + math.log(math.pi) + math.log(2.0),
                                                  abs=5e-3)


def test_wigner_entropy_coherent():
    p = ModelParams(1.0, 1.0, 0.05)
    single = initial_coefficients(InitialStateSpec(2.5 + 0j, -1, p, kind="coherent"))
    g = ps.grid(amplitudes_at(single, 0.0), "wigner", resolution=512)
    assert obs.wigner_entropy(g) == pytest.approx(1.0 + math.log(math.pi / 2.0), abs=5e-3)
    mixture = initial_coefficients(InitialStateSpec(2.5 + 0j, -1, p))
    gm = ps.grid(amplitudes_at(mixture, 0.0), "wigner", resolution=512)
    assert obs.wigner_entropy(gm) >= obs.wigner_entropy(g)


def test_negativity_time_zero_and_fock():
    p = ModelParams(1.0, 1.0, 0.05)
    mixture = initial_coefficients(InitialStateSpec(2.5 + 0j, -1, p))
    g0 = ps.grid(amplitudes_at(mixture, 0.0), "wigner", resolution=512)
    assert obs.negativity(g0) == pytest.approx(0.0, abs=1e-3)
    # single-photon Fock state via the branch machinery at zero displacement
    u = np.array([0.0, 1.0], dtype=complex)
    v = np.zeros(2, dtype=complex)
    R, res = 7.0, 512
    h = 2 * R / res
    ax = -R + h * (np.arange(res) + 0.5)
    W = ps._wigner_eval(u, v, 0.0, ax[None, :] + 1j * ax[:, None])
    g1 = ps.PhaseGrid(kind="wigner", extent=R, resolution=res, t=0.0, values=W)
    assert obs.negativity(g1) == pytest.approx(4.0 * math.exp(-0.5) - 2.0, abs=2e-3)


def test_functional_kind_validation(snapshot_coeffs):
    gq = ps.grid(amplitudes_at(snapshot_coeffs, 0.0), "husimi", resolution=64)
    gw = ps.grid(amplitudes_at(snapshot_coeffs, 0.0), "wigner", resolution=64)
    with pytest.raises(ValueError):
        obs.wehrl_entropy(gw)
    with pytest.raises(ValueError):
        obs.wigner_entropy(gq)
    with pytest.raises(ValueError):
        obs.negativity(gq)


# ---------------------------------------------------------------- estimators

def test_time_average_basics():
    t = np.linspace(0.0, 10.0, 1001)
    const = obs.ObservableSeries(times=t, values=np.full_like(t, 3.3), label="c")
    assert obs.time_average(const, (0.0, 10.0)) == pytest.approx(3.3, rel=1e-12)
    t2 = np.linspace(0.0, 6 * math.pi, 20001)
    sine = obs.ObservableSeries(times=t2, values=np.sin(t2), label="s")
    assert obs.time_average(sine, (0.0, 6 * math.pi)) == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(ValueError):
        obs.time_average(const, (20.0, 30.0))


def test_entropy_production_time_synthetic():
    t = np.linspace(0.0, 10.0, 101)
    rise = obs.ObservableSeries(times=t, values=np.minimum(t, 4.0), label="r")
    mean = obs.time_average(rise, (0.0, 10.0))
    assert obs.entropy_production_time(rise) == pytest.approx(mean, rel=1e-9)
    flat = obs.ObservableSeries(times=t, values=np.full_like(t, 1.0), label="f")
    with pytest.raises(obs.EstimatorError):
        obs.entropy_production_time(flat)


def test_long_period_sinusoid():
    t = np.arange(0.0, 2200.0, 1.0)
    series = obs.ObservableSeries(times=t, values=np.cos(2 * math.pi * t / 997.0), label="p")
    assert obs.long_period_estimate(series) == pytest.approx(997.0, rel=3e-3)


def test_long_period_aperiodic_flag(rng):
    t = np.arange(0.0, 512.0, 1.0)
    drift = obs.ObservableSeries(times=t, values=np.exp(-t / 80.0), label="d")
    with pytest.raises(obs.EstimatorError):
        obs.long_period_estimate(drift)


def test_series_validation():
    with pytest.raises(ValueError):
        obs.ObservableSeries(times=np.array([0.0, 1.0]), values=np.array([1.0]), label="x")
    with pytest.raises(ValueError):
        obs.ObservableSeries(times=np.array([1.0, 0.5]), values=np.array([1.0, 2.0]), label="x")
    with pytest.raises(ValueError):
        obs.ObservableSeries(times=np.array([0.0, 1.0]),
                             values=np.array([1.0, math.inf]), label="x")


def test_build_series_parallel_matches_serial(snapshot_coeffs):
    times = np.linspace(0.0, 30.0, 7)
    kw = dict(measures=["sigma_z", "entropy", "wehrl"], resolution=96)
    s1 = obs.build_series(snapshot_coeffs, times, workers=1, **kw)
    s2 = obs.build_series(snapshot_coeffs, times, workers=2, **kw)
    for key in kw["measures"]:
        np.testing.assert_array_equal(s1[key].values, s2[key].values)
        assert s1[key].params_digest == s2[key].params_digest


def test_build_series_rejects_unknown_measure(snapshot_coeffs):
    with pytest.raises(ValueError):
        obs.build_series(snapshot_coeffs, [0.0, 1.0], ["entropy", "blah"])


def test_build_series_done_rows_respected(snapshot_coeffs):
    times = np.linspace(0.0, 10.0, 5)
    full = obs.build_series(snapshot_coeffs, times, ["sigma_z"])
    # pre-supply two poisoned rows; they must be taken verbatim, not recomputed
    done = {float(times[1]): {"sigma_z": 123.0}, float(times[3]): {"sigma_z": -7.0}}
    part = obs.build_series(snapshot_coeffs, times, ["sigma_z"], done=done)
    assert part["sigma_z"].values[1] == 123.0
    assert part["sigma_z"].values[3] == -7.0
    assert part["sigma_z"].values[0] == full["sigma_z"].values[0]
