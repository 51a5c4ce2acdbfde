import math

import numpy as np
import pytest
from scipy import signal
from hypothesis import given, settings, strategies as st

from helixfield.closedform import eval_arrays, eval_state, redundancy_series, solve
from helixfield.dynamics import integrate, rk4_arrays
from helixfield.model import HelixState

from conftest import periods, random_cases

coord = st.floats(-2, 2, allow_nan=False)
states = st.builds(lambda *x: HelixState(x[:3], x[3:]), *[coord] * 6)


def test_solve_fig3_constants(fig3):
    sol = solve(*fig3)
    assert (sol.a, sol.b, sol.c) == pytest.approx((-1.0, -1.0, -0.64), abs=1e-12)
    assert sol.r == pytest.approx(1.55229, abs=1e-5)
    # c0 = (-0.4 - 1.4 - 0.448) / 2.4096
    assert sol.c0 == pytest.approx(-2.248 / 2.4096, abs=1e-12)
    assert sol.c0 == pytest.approx(-0.93294, abs=1e-5)
    assert sol.r ** 2 == pytest.approx(sol.a ** 2 + sol.b ** 2 + sol.c ** 2, rel=1e-12)


@given(states, st.floats(0.01, 0.5))
def test_side_condition(state, g):
    sol = solve(state, g)
    if sol.degenerate:
        return
    assert abs(sol.a * sol.k1 + sol.b * sol.k2 + sol.c * sol.k3) <= 1e-12


@given(states, st.floats(0.01, 0.5))
def test_eval_at_zero_reproduces_state(state, g):
    s0 = eval_state(solve(state, g), 0.0)
    assert np.allclose(s0.p, state.p, atol=1e-12, rtol=0)
    assert np.allclose(s0.q, state.q, atol=1e-12, rtol=0)


def test_stationary_state_stays_put():
    s = HelixState((0.4, 1.4, 0.7), (0.4, 1.4, 0.7))
    sol = solve(s, 0.2)
    assert sol.stationary and not sol.degenerate and sol.r > 0
    assert eval_state(sol, 12.3) == s


def test_degenerate_solution(fig3):
    sol = solve(fig3[0], 0.0)
    assert sol.degenerate and sol.c0 is None and sol.k1 is None
    for t in (0.0, 3.7, -100.0):
        assert eval_state(sol, t) == fig3[0]
    opposite = HelixState((1.0, -2.0, 0.5), (-1.0, 2.0, -0.5))
    assert solve(opposite, 0.3).degenerate


def test_matches_rk4_fig3(fig3):
    traj = integrate(*fig3, dt=0.01, n_steps=5000)
    p, q = eval_arrays(solve(*fig3), traj.times)
    assert np.max(np.abs(p - traj.p)) <= 1e-6
    assert np.max(np.abs(q - traj.q)) <= 1e-6


def test_matches_rk4_random_states():
    p0, q0, g = random_cases(30, seed=7)
    T = periods(p0, q0, g)
    n = 5000
    ps, qs = rk4_arrays(p0, q0, g, 5 * T / n, n)
    for i in range(30):
        sol = solve(HelixState.from_arrays(p0[i], q0[i]), g[i])
        p, q = eval_arrays(sol, np.arange(n + 1) * (5 * T[i] / n))
        assert np.max(np.abs(p - ps[:, i])) <= 1e-5
        assert np.max(np.abs(q - qs[:, i])) <= 1e-5


def test_total_redundancy_constant_fig3(fig3):
    rs = redundancy_series(solve(*fig3), np.linspace(0, 50, 5001))
    assert np.max(np.abs(rs.total + 3.82)) <= 1e-9


def test_total_redundancy_eq16(eq16):
    rs = redundancy_series(solve(*eq16), np.linspace(0, 50, 5001))
    # (0.16 + 1.96 + 0.49) - (0.04 + 0.7569 + 0.81)
    assert np.max(np.abs(rs.total - 1.0031)) <= 1e-9


def test_identical_vectors_give_zero():
    s = HelixState((0.4, 1.4, 0.7), (0.4, 1.4, 0.7))
    rs = redundancy_series(solve(s, 0.2), np.linspace(0, 10, 101))
    assert np.all(rs.components == 0)


def test_components_band_limited(fig3):
    # R_i = 2 s_i P_i - s_i**2, so {0, r} already suffices; {0, r, 2r} a fortiori
    sol = solve(*fig3)
    t = np.linspace(0, 3 * sol.period, 600)
    rs = redundancy_series(sol, t)
    rt = sol.r * t
    basis = np.column_stack([np.ones_like(t), np.cos(rt), np.sin(rt), np.cos(2 * rt), np.sin(2 * rt)])
    for i in range(3):
        coef, *_ = np.linalg.lstsq(basis, rs.components[:, i], rcond=None)
        assert np.max(np.abs(basis @ coef - rs.components[:, i])) <= 1e-9
        coef1, *_ = np.linalg.lstsq(basis[:, :3], rs.components[:, i], rcond=None)
        assert np.max(np.abs(basis[:, :3] @ coef1 - rs.components[:, i])) <= 1e-9


def test_components_linear_in_p(fig3):
    sol = solve(*fig3)
    t = np.linspace(0, 20, 201)
    p, _ = eval_arrays(sol, t)
    s = np.array([sol.alpha, sol.beta, sol.gamma])
    rs = redundancy_series(sol, t)
    assert np.allclose(rs.components, 2 * s * p - s ** 2, atol=1e-12, rtol=0)


def test_period_from_autocorrelation(fig3):
    sol = solve(*fig3)
    dt = 0.002
    t = np.arange(0, 200 * sol.period, dt)
    x = eval_arrays(sol, t)[0][:, 0]
    x = x - x.mean()
    ac = signal.correlate(x, x, mode="full", method="fft")[len(x) - 1:]
    ac /= np.arange(len(x), 0, -1)  # unbiased
    # first local maximum after the first zero crossing of the autocorrelation
    start = int(np.argmax(ac < 0))
    lag = start + int(np.argmax(ac[start:start + int(1.5 * sol.period / dt)]))
    # refine with a parabola through the peak
    y0, y1, y2 = ac[lag - 1:lag + 2]
    lag_f = lag + 0.5 * (y0 - y2) / (y0 - 2 * y1 + y2)
    assert lag_f * dt == pytest.approx(2 * math.pi / sol.r, rel=1e-3)


@given(states, st.floats(0.01, 0.5), st.floats(-20, 20))
@settings(max_examples=50)
def test_periodicity(state, g, t):
    sol = solve(state, g)
    if sol.degenerate:
        return
    p1, q1 = eval_arrays(sol, t)
    p2, q2 = eval_arrays(sol, t + sol.period)
    scale = max(1.0, abs(t) * sol.r)
    assert np.allclose(p1, p2, atol=1e-9 * scale, rtol=0)
    assert np.allclose(q1, q2, atol=1e-9 * scale, rtol=0)


def test_redundancy_series_rejects_bad_times(fig3):
    with pytest.raises(ValueError):
        redundancy_series(solve(*fig3), [0.0, math.inf])
