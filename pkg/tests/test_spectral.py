import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helixfield.closedform import redundancy_series, solve
from helixfield.spectral import FourierModel, default_omega0, default_terms, fit, reconstruct, spectrum

W = 2 * math.pi  # base frequency for a unit period


def synthetic(t, w=W):
    return 2 + 3 * np.cos(2 * w * t) + 1.5 * np.sin(5 * w * t)


@pytest.fixture
def synth_model():
    t = np.arange(100) / 100.0
    return fit(t, synthetic(t), n_terms=8, omega0=W)


def test_constant_series():
    t = np.linspace(0, 10, 30)
    m = fit(t, np.full_like(t, 5.0), n_terms=4)
    assert m.offset == pytest.approx(5.0, abs=1e-12)
    assert np.max(np.abs(m.b)) <= 1e-12 and np.max(np.abs(m.d)) <= 1e-12


def test_synthetic_recovery(synth_model):
    m = synth_model
    assert m.offset == pytest.approx(2.0, abs=1e-9)
    expected_b = np.zeros(8)
    expected_d = np.zeros(8)
    expected_b[1] = 3.0
    expected_d[4] = 1.5
    assert np.max(np.abs(m.b - expected_b)) <= 1e-9
    assert np.max(np.abs(m.d - expected_d)) <= 1e-9
    assert not m.interpolating


def test_default_omega_from_span():
    # even grid of 100 samples with spacing 0.01: base period is 100 * 0.01
    t = np.arange(100) / 100.0
    m = fit(t, synthetic(t), n_terms=8)
    assert m.omega0 == pytest.approx(W)
    assert m.t0 == 0.0
    assert m.b[1] == pytest.approx(3.0, abs=1e-9)
    assert m.d[4] == pytest.approx(1.5, abs=1e-9)


def test_reconstruct_fresh_points(synth_model):
    t = np.random.default_rng(0).uniform(-3, 3, 50)
    assert np.max(np.abs(reconstruct(synth_model, t) - synthetic(t))) <= 1e-9
    assert isinstance(reconstruct(synth_model, 0.25), float)


def test_reconstruct_zero_harmonics():
    m = FourierModel(1.5, np.zeros(3), np.zeros(3), omega0=2.0, t0=0.0)
    assert np.all(reconstruct(m, np.linspace(-5, 5, 11)) == 1.5)


def test_spectrum_synthetic(synth_model):
    sp = spectrum(synth_model)
    expected = np.zeros(8)
    expected[1], expected[4] = 9.0, 2.25
    assert np.max(np.abs(sp.powers - expected)) <= 1e-8
    assert sp.normalized.sum() == pytest.approx(1.0)
    assert sp.peak == 2


def test_spectrum_zero():
    sp = spectrum(FourierModel(0.0, np.zeros(4), np.zeros(4), omega0=1.0, t0=0.0))
    assert np.all(sp.powers == 0) and sp.normalized is None


@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=1, max_size=6),
       st.floats(0, 2 * math.pi))
def test_spectrum_phase_rotation_invariant(pairs, theta):
    b = np.array([p[0] for p in pairs])
    d = np.array([p[1] for p in pairs])
    rb = b * math.cos(theta) + d * math.sin(theta)
    rd = -b * math.sin(theta) + d * math.cos(theta)
    v1 = spectrum(FourierModel(0.0, b, d, 1.0, 0.0)).powers
    v2 = spectrum(FourierModel(0.0, rb, rd, 1.0, 0.0)).powers
    assert np.allclose(v1, v2, atol=1e-12, rtol=1e-12)


def test_interpolating_fit_paper_setting():
    years = np.arange(1980, 2005, dtype=float)
    y = np.random.default_rng(3).normal(size=25)
    m = fit(years, y, n_terms=15)
    assert m.interpolating and m.n_terms == 15
    assert np.max(np.abs(reconstruct(m, years) - y)) <= 1e-8


def test_default_omega_endpoints_distinct():
    t = np.arange(1980, 2005, dtype=float)
    w = default_omega0(t)
    assert w == pytest.approx(2 * math.pi / 25)
    phases = np.mod(w * (t - t[0]), 2 * math.pi)
    assert len(np.unique(np.round(phases, 9))) == 25


def test_default_terms():
    assert default_terms(25) == 12
    assert default_terms(2) == 1
    m = fit(np.arange(25.0), np.sin(np.arange(25.0)))
    assert m.n_terms == 12


@pytest.mark.parametrize("t,y,kw", [
    ([0.0], [1.0], {}),
    ([0.0, 0.0, 1.0], [1.0, 2.0, 3.0], {}),
    ([0.0, 1.0], [1.0, 2.0], dict(n_terms=0)),
    ([0.0, 1.0], [1.0, math.nan], {}),
    ([0.0, 1.0], [1.0, 2.0], dict(omega0=-1.0)),
])
def test_fit_errors(t, y, kw):
    with pytest.raises(ValueError):
        fit(t, y, **kw)


def test_residual_monotone_in_terms():
    rng = np.random.default_rng(4)
    t = np.sort(rng.uniform(0, 10, 60))
    y = rng.normal(size=60) + np.sin(t)
    rss = [fit(t, y, n_terms=n, omega0=0.5).rss for n in range(1, 30)]
    assert all(b <= a + 1e-9 for a, b in zip(rss, rss[1:]))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25)
def test_linearity(seed):
    rng = np.random.default_rng(seed)
    t = np.sort(rng.uniform(0, 5, 40))
    y1, y2 = rng.normal(size=40), rng.normal(size=40)
    m1, m2, m12 = (fit(t, y, n_terms=6, omega0=1.1) for y in (y1, y2, y1 + y2))
    assert m12.offset == pytest.approx(m1.offset + m2.offset, abs=1e-9)
    assert np.allclose(m12.b, m1.b + m2.b, atol=1e-9)
    assert np.allclose(m12.d, m1.d + m2.d, atol=1e-9)


@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
@settings(max_examples=25)
def test_in_basis_exactness(n, seed):
    rng = np.random.default_rng(seed)
    truth = FourierModel(rng.normal(), rng.normal(size=n), rng.normal(size=n), omega0=W, t0=0.0)
    t = np.sort(rng.choice(np.arange(400) / 400.0, size=2 * n + 1 + rng.integers(0, 10), replace=False))
    m = fit(t, reconstruct(truth, t), n_terms=n, omega0=W, t0=0.0)
    assert abs(m.offset - truth.offset) <= 1e-9
    assert np.max(np.abs(m.b - truth.b)) <= 1e-9
    assert np.max(np.abs(m.d - truth.d)) <= 1e-9


def test_redundancy_one_period_band_limited(fig3):
    sol = solve(*fig3)
    t = np.linspace(0, sol.period, 200, endpoint=False)
    r1 = redundancy_series(sol, t).components[:, 0]
    m = fit(t, r1, n_terms=6, omega0=sol.r)
    sp = spectrum(m)
    assert np.max(np.abs(reconstruct(m, t) - r1)) <= 1e-9
    assert sp.powers[0] > 1e-3
    assert np.all(sp.powers[2:] <= 1e-18)


@pytest.mark.parametrize("g", [0.05, 0.2, 0.35])
def test_pipeline_closure_dominant_bin(fig3, g):
    sol = solve(fig3[0], g)
    t = np.linspace(0, 50, 1001)
    r1 = redundancy_series(sol, t).components[:, 0]
    m = fit(t, r1, n_terms=60)
    k = spectrum(m).peak
    w = m.omega0
    assert abs(k * w - sol.r) <= w / 2 or abs(k * w - 2 * sol.r) <= w / 2


def test_detrend_and_window_flags():
    t = np.linspace(0, 10, 101)
    y = 0.7 * t + np.cos(2 * math.pi * t / 10)
    m = fit(t, y, n_terms=5, omega0=2 * math.pi / 10, detrend=True)
    assert m.trend[0] == pytest.approx(0.7, abs=0.05)
    assert np.max(np.abs(reconstruct(m, t) - y)) <= 1e-9
    mw = fit(t, y, n_terms=5, window=True)
    assert not np.allclose(mw.b, fit(t, y, n_terms=5).b)
