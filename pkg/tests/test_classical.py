import numpy as np
import pytest

from crosswave.classical import (ClassicalPath, OscillatorPair, crossing_path,
                                 curvature_integral, integrate_trajectory,
                                 lens_forward, lens_inverse, select_horizon,
                                 solve_oscillator, taylor_at_crossing)
from crosswave.errors import EnergyDriftError, HorizonError
from crosswave.fourier import SpatialGrid
from crosswave.params import derive_scales


def make_params(eps=1e-2, c=1.0, xi0=1.0, kappa=0.0):
    return derive_scales(eps, c, kappa, xi0, 0.5, 0.1, 1.0)


def test_initial_condition_and_action_rate():
    xi0, delta = 2.0, 0.1
    path = integrate_trajectory(0.0, xi0, delta, +1, 0.0, 0.4, 1e-4)
    assert (path.t[0], path.x[0], path.xi[0], path.S[0]) == (0.0, 0.0, xi0, 0.0)
    # S'(0) = xi0^2/2 - delta = 1.9
    h = path.t[1]
    rate = (path.S[1] - path.S[0]) / h
    assert rate == pytest.approx(xi0 ** 2 / 2 - delta, abs=1e-4)


def test_energy_conservation_plus_branch():
    xi0, delta = 1.5, 0.05
    path = integrate_trajectory(0.0, xi0, delta, +1, 0.0, 1.0, 1e-4)
    e = path.energy()
    assert e[0] == pytest.approx(xi0 ** 2 / 2 + delta, rel=1e-14)
    assert np.abs(e - e[0]).max() / e[0] < 1e-8


def test_backward_integration_and_time_reversal():
    xi0, delta = 1.0, 0.1
    fwd = integrate_trajectory(0.0, xi0, delta, +1, 0.0, 0.5, 1e-4)
    assert fwd.t[0] == 0.0 and fwd.t[-1] == pytest.approx(0.5)
    back = integrate_trajectory(fwd.x[-1], fwd.xi[-1], delta, +1, 0.5, 0.0, 1e-4)
    # samples come back ascending; index 0 is t=0
    assert back.t[0] == pytest.approx(0.0)
    assert back.x[0] == pytest.approx(0.0, abs=1e-8)
    assert back.xi[0] == pytest.approx(xi0, abs=1e-8)
    assert back.S[0] + fwd.S[-1] == pytest.approx(0.0, abs=1e-8)


def test_velocity_bound_on_plus_branch():
    path = integrate_trajectory(0.0, 2.0, 0.05, +1, 0.0, 2.0, 1e-4)
    # |xi'| = |x|/sqrt(x^2+delta^2) < 1 everywhere
    accel = np.abs(np.diff(path.xi) / np.diff(path.t))
    assert accel.max() < 1.0


def test_energy_guard_trips_on_coarse_step():
    # delta=1e-3 has curvature 1/delta = 1000 at the crossing; dt=0.05 cannot
    # resolve it
    with pytest.raises(EnergyDriftError):
        integrate_trajectory(0.0, 1.0, 1e-3, +1, 0.0, 1.0, 0.05)


def test_minus_branch_turns_around():
    # on the lower branch the force pulls toward larger |x|; a packet launched
    # at the crossing accelerates away
    path = integrate_trajectory(0.0, 0.5, 0.2, -1, 0.0, 1.0, 1e-4)
    assert path.xi[-1] > 0.5
    e = path.energy()
    assert np.abs(e - e[0]).max() / abs(e[0]) < 1e-8


def test_crossing_path_merges_and_is_odd():
    p = make_params(eps=1e-2, xi0=1.0)
    path = crossing_path(p, -0.5, 0.5, 1e-4)
    assert path.covers(-0.5, 0.5)
    i0 = np.searchsorted(path.t, 0.0)
    assert path.t[i0] == 0.0 and path.S[i0] == 0.0
    # x odd, xi even in t for the crossing initial data
    assert path.x_of(0.3) == pytest.approx(-path.x_of(-0.3), abs=1e-9)
    assert path.xi_of(0.3) == pytest.approx(path.xi_of(-0.3), abs=1e-9)


def test_trajectory_bounded_uniformly_in_delta():
    sup = []
    for delta in (1e-1, 1e-2, 1e-3):
        path = integrate_trajectory(0.0, 1.0, delta, +1, 0.0, 0.5,
                                    min(1e-4, delta / 50))
        sup.append(np.abs(path.x).max() + np.abs(path.xi).max())
    assert max(sup) / min(sup) < 1.5


def test_taylor_table_values():
    tab = taylor_at_crossing(2.0, 0.1)
    assert tab.xi[2] == pytest.approx(-20.0)
    assert tab.S[3] == pytest.approx(-80.0)
    assert tab.x == (0.0, 2.0, 0.0, -20.0)
    assert tab.S[1] == pytest.approx(2.0 - 0.1)
    with pytest.raises(ValueError):
        taylor_at_crossing(-1.0, 0.1)


def test_taylor_third_derivative_matches_trajectory():
    xi0, delta = 2.0, 0.1
    path = crossing_path(make_params(xi0=xi0), -0.02, 0.02, 1e-6)
    h = 1e-3   # truncation ~ (h xi0/delta)^2 must sit below the 1e-3 band
    ts = np.array([-2, -1, 0, 1, 2]) * h
    xs = path.x_of(ts)
    third = (-xs[0] / 2 + xs[1] - xs[3] + xs[4] / 2) / h ** 3
    assert third == pytest.approx(-xi0 / delta, rel=1e-3)
    xis = path.xi_of(ts)
    second = (xis[1] - 2 * xis[2] + xis[3]) / h ** 2
    assert second == pytest.approx(-xi0 / delta, rel=1e-3)


def test_curvature_integral_zero_and_model():
    p = make_params()
    path = crossing_path(p, -0.1, 0.6, 1e-4)
    assert curvature_integral(path, 0.0) == 0.0
    # synthetic straight-line path x = xi0 s: closed-form antiderivative
    # s / sqrt(xi0^2 s^2 + delta^2)
    xi0, delta, T = 1.0, 0.05, 0.5
    ts = np.linspace(-0.1, 0.7, 1601)
    lin = ClassicalPath(+1, delta, ts, xi0 * ts, np.full_like(ts, xi0),
                        np.zeros_like(ts))
    exact = T / np.sqrt(xi0 ** 2 * T ** 2 + delta ** 2)
    assert curvature_integral(lin, T) == pytest.approx(exact, rel=1e-6)


def test_curvature_integral_bounded_in_delta():
    vals = []
    for delta in (1e-1, 1e-2, 1e-3):
        eps = delta ** 2    # c = 1
        p = derive_scales(eps, 1.0, 0.0, 1.0, 0.5, 0.1, 1.0)
        path = crossing_path(p, -0.05, 0.55, min(1e-4, delta / 50))
        vals.append(curvature_integral(path, 0.5))
    assert max(vals) / min(vals) < 2.0


def constant_omega_path(omega: float, t_hi: float) -> ClassicalPath:
    # lambda''(0, delta) = 1/delta, so x == 0 with delta = 1/omega^2 freezes
    # the coefficient at omega^2
    ts = np.linspace(-0.1, t_hi + 0.1, 801)
    z = np.zeros_like(ts)
    return ClassicalPath(+1, 1.0 / omega ** 2, ts, z, z + 1.0, z)


def test_oscillator_constant_omega_oracle():
    omega = 2.0
    path = constant_omega_path(omega, 1.0)
    pair = solve_oscillator(path, 0.7, 1e-4)
    assert (pair.mu[0], pair.nu[0]) == (0.0, 1.0)
    assert (pair.mu_dot[0], pair.nu_dot[0]) == (1.0, 0.0)
    t = pair.t
    assert np.abs(pair.mu - np.sin(omega * t) / omega).max() < 1e-8
    assert np.abs(pair.nu - np.cos(omega * t)).max() < 1e-8
    assert np.abs(pair.wronskian() - 1.0).max() < 1e-10


def test_oscillator_wronskian_on_real_path():
    p = make_params(eps=1e-2, xi0=2.0)
    path = crossing_path(p, -0.6, 0.1, 1e-4)
    pair = solve_oscillator(path, 0.5, 1e-4, t_anchor=-0.5)
    assert np.abs(pair.wronskian() - 1.0).max() < 1e-8
    ratio = pair.mu / pair.nu
    assert np.all(np.diff(ratio) > 0)
    assert pair.nu.min() > 0.5   # xi0=2 keeps nu comfortably positive


def test_oscillator_horizon_abort():
    # constant omega=2: nu = cos(2t) crosses 1e-3 just before t = pi/4
    path = constant_omega_path(2.0, 1.2)
    with pytest.raises(HorizonError):
        solve_oscillator(path, 1.0, 1e-4)
    pair = select_horizon(path, 1.0, 1e-4, nu_floor=0.5)
    # cos(2 T0) >= 0.5 means T0 <= pi/6
    assert pair.T0 == pytest.approx(np.pi / 6, abs=1e-3)
    assert pair.nu.min() >= 0.5


def test_lens_identity_at_zero():
    path = constant_omega_path(2.0, 1.0)
    pair = solve_oscillator(path, 0.5, 1e-4)
    grid = SpatialGrid(256, -16.0, 16.0)
    u = np.exp(-grid.points ** 2 / 2).astype(complex)
    s, v = lens_forward(u, 0.0, pair, grid)
    assert s == pytest.approx(0.0, abs=1e-12)
    assert np.abs(v - u).max() < 1e-12


def test_lens_round_trip_and_norm():
    path = constant_omega_path(2.0, 1.0)
    pair = solve_oscillator(path, 0.6, 1e-4)
    grid = SpatialGrid(512, -16.0, 16.0)
    x = grid.points
    u = (np.exp(-x ** 2 / 2) * np.exp(0.3j * x)).astype(complex)
    t = 0.45
    s, v = lens_forward(u, t, pair, grid)
    assert s == pytest.approx(np.tan(2 * t) / 2, abs=1e-6)
    # norm preserved through the Jacobian factor
    assert grid.norm_l2(v) == pytest.approx(grid.norm_l2(u), abs=1e-8)
    t_back, u_back = lens_inverse(v, s, pair, grid)
    assert t_back == pytest.approx(t, abs=1e-9)
    assert np.abs(u_back - u).max() < 1e-10


def test_lens_inverse_with_explicit_tau():
    path = constant_omega_path(2.0, 1.0)
    pair = solve_oscillator(path, 0.6, 1e-4)
    grid = SpatialGrid(256, -16.0, 16.0)
    u = np.exp(-(grid.points - 1.0) ** 2).astype(complex)
    s, v = lens_forward(u, 0.3, pair, grid)
    _, u_back = lens_inverse(v, s, pair, grid, tau=0.3)
    assert np.abs(u_back - u).max() < 1e-10
