"""Acceptance gate: nine end-to-end criteria, one verdict line each.

Run with -s to see the verdict lines on success; under plain -v the test
names themselves carry the per-criterion pass/fail.
"""

import math
from types import SimpleNamespace

import numpy as np
import pytest

from crosswave.classical import (crossing_path, select_horizon,
                                 solve_oscillator, taylor_at_crossing,
                                 ClassicalPath)
from crosswave.diagnostics import convergence_sweep, run_experiment
from crosswave.fourier import SpatialGrid
from crosswave.inner import (InnerField, integrate_lz_family,
                             numeric_scattering, scattering_coeffs)
from crosswave.params import NumericsConfig, derive_scales
from crosswave.profile import (initial_profile_gaussian, solve_profile_direct,
                               solve_profile_lens)
from crosswave.semiclassical import SpinorField, evolve


def _verdict(criterion, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
    assert ok, f"criterion {criterion}: {detail}"


@pytest.fixture(scope="module")
def transition_run():
    # epsilon 1e-3, c=1, xi0=2, kappa=0.05, gamma=0.1, c0=1, N=2^15;
    # domain [-2,2] and dt=eps/5 hold the packet and resolve the carrier
    params = derive_scales(1e-3, 1.0, 0.05, 2.0, 0.5, 0.1, 1.0)
    num = NumericsConfig(n_points=2 ** 15, x_min=-2.0, x_max=2.0,
                         dt=2e-4, ode_dt=1e-4)
    return params, run_experiment(params, num)


@pytest.fixture(scope="module")
def epsilon_sweep():
    params = derive_scales(1e-3, 1.0, 0.05, 2.0, 0.5, 0.1, 1.0)
    return convergence_sweep(params, [1e-2, 3e-3, 1e-3])


def test_criterion_1_scattering_unitarity():
    worst = 0.0
    for eta in (0.25, 0.5, 0.75, 1.0, 1.5, 2.0):
        sd = scattering_coeffs(eta)
        worst = max(worst, abs(abs(sd.a_coeff) ** 2
                               + abs(sd.b_coeff) ** 2 - 1.0))
    _verdict(1, worst < 1e-12,
             f"|a|^2+|b|^2 unitarity defect {worst:.2e} (tol 1e-12)")


def test_criterion_2_numeric_vs_closed_form_scattering():
    worst = 0.0
    for eta in (0.5, 1.0, 1.5):
        matrix = numeric_scattering(eta, 200.0, 5e-4)
        err = abs(abs(matrix[0, 0]) ** 2 - math.exp(-math.pi * eta ** 2))
        worst = max(worst, err)
    _verdict(2, worst < 1e-3,
             f"| |M11|^2 - e^(-pi eta^2) | max {worst:.2e} (tol 1e-3)")


def test_criterion_3_transition_probability(transition_run):
    params, bundle = transition_run
    report = bundle.report
    expected = math.exp(-math.pi / 2.0)
    rel = abs(report.p_measured - expected) / expected
    ok = rel < 0.10 and report.mass_minus_before < 1e-2
    _verdict(3, ok,
             f"p_measured {report.p_measured:.5f} vs e^(-pi/2) {expected:.5f} "
             f"(rel {rel:.3f}, tol 0.10); incoming lower-mode mass "
             f"{report.mass_minus_before:.2e} (tol 1e-2)")


def test_criterion_4_outer_convergence(epsilon_sweep):
    outer_pairs, _ = epsilon_sweep
    errs = [v for _, v in outer_pairs]
    decreasing = all(b < a for a, b in zip(errs, errs[1:]))
    slope = float(np.polyfit(np.log([e for e, _ in outer_pairs]),
                             np.log(errs), 1)[0])
    _verdict(4, decreasing and slope > 0.05,
             f"outer errors {['%.4f' % v for v in errs]} decreasing={decreasing}, "
             f"slope {slope:.3f} > gamma/2 = 0.05")


def test_criterion_5_inner_smallness(epsilon_sweep):
    _, inner_pairs = epsilon_sweep
    errs = [v for _, v in inner_pairs]
    decreasing = all(b < a for a, b in zip(errs, errs[1:]))
    slope = float(np.polyfit(np.log([e for e, _ in inner_pairs]),
                             np.log(errs), 1)[0])
    _verdict(5, decreasing and slope > 0.025,
             f"inner sup errors {['%.4f' % v for v in errs]} "
             f"decreasing={decreasing}, slope {slope:.3f} > gamma/4 = 0.025")


def test_criterion_6_conservation_suite(transition_run):
    params, bundle = transition_run

    masses = np.array(bundle.mass_series)
    span = params.T + params.t_eps
    mass_rate = np.abs(masses - masses[0]).max() / masses[0] / span

    slack = 0.05 * params.T
    path = crossing_path(params, -params.T - slack, params.t_eps + slack,
                         1e-4)
    energy = path.energy()
    energy_drift = (energy.max() - energy.min()) / abs(energy[0])

    osc_params = derive_scales(1e-2, 1.0, 0.05, 2.0, 0.5, 0.1, 1.0)
    osc_path = crossing_path(osc_params, -0.6, 0.6, 1e-4)
    pair = select_horizon(osc_path, 0.5, 1e-4)
    wronskian_dev = np.abs(pair.wronskian() - 1.0).max()

    family = bundle.inner_trajectory
    base = family[0].per_y_norm()
    norm_drift = max(np.abs(fld.per_y_norm() - base).max() for fld in family)
    norm_rel = norm_drift / base.max()

    ok = (mass_rate < 1e-8 and energy_drift < 1e-8
          and wronskian_dev < 1e-8 and norm_rel < 1e-10)
    _verdict(6, ok,
             f"mass drift/time {mass_rate:.2e} (1e-8), classical energy "
             f"{energy_drift:.2e} (1e-8), Wronskian {wronskian_dev:.2e} "
             f"(1e-8, T0={pair.t[-1]:.3f}), per-y norm {norm_rel:.2e} (1e-10)")


def test_criterion_7_oracle_equivalences():
    # (a) lens route vs direct profile solve, kappa = 0
    y_grid = SpatialGrid(1024, -32.0, 32.0)
    p = derive_scales(1e-2, 1.0, 0.0, 2.0, 0.5, 0.1, 1.0)
    path = crossing_path(p, -0.6, 0.1, 1e-4)
    a = initial_profile_gaussian(y_grid, t=-0.5)
    direct = solve_profile_direct(a, p, path, (-0.5, 0.0), 2e-4)[-1]
    lens = solve_profile_lens(a, p, path, (-0.5, 0.0), 2e-4)[-1]
    lens_err = y_grid.norm_l2(direct.u - lens.u)

    # (b) frozen-potential Rabi oscillation against the closed form
    pr = derive_scales(1e-2, 2.0, 0.0, 2.0, 0.5, 0.1, 1.0)
    grid = SpatialGrid(1024, -4.0, 4.0)
    x0, delta = 0.37, pr.delta
    k = grid.wavenumbers[7]
    v0 = np.array([0.6, 0.8j], dtype=complex)
    plane = np.exp(1j * k * grid.points)
    psi0 = SpinorField.create(grid, np.stack([v0[0] * plane, v0[1] * plane]))
    T = 0.3
    res = evolve(psi0, pr, (0.0, T), 1e-3,
                 potential_x=np.full(grid.n, x0), boundary_check=False)
    r0 = np.hypot(x0, delta)
    V0 = np.array([[x0, delta], [delta, -x0]])
    U = (np.cos(r0 * T / pr.epsilon) * np.eye(2)
         - 1j * np.sin(r0 * T / pr.epsilon) / r0 * V0)
    vT = U @ v0
    kin = np.exp(-0.5j * pr.epsilon * k ** 2 * T)
    exact = np.stack([vT[0] * plane * kin, vT[1] * plane * kin])
    rabi_err = grid.norm_l2(res.final.values - exact) / math.sqrt(psi0.mass)

    # (c) constant-coefficient oscillator vs sin/cos
    omega = 2.0
    ts = np.linspace(-0.1, 1.1, 801)
    z = np.zeros_like(ts)
    const_path = ClassicalPath(+1, 1.0 / omega ** 2, ts, z, z + 1.0, z)
    pair = solve_oscillator(const_path, 0.7, 1e-4)
    osc_err = max(np.abs(pair.mu - np.sin(omega * pair.t) / omega).max(),
                  np.abs(pair.nu - np.cos(omega * pair.t)).max())

    # (d) c = 0 inner family vs the decoupled closed form
    fake = SimpleNamespace(xi0=2.0, c=0.0)
    fgrid = SpatialGrid(256, -16.0, 16.0)
    rng = np.random.default_rng(7)
    f0 = rng.normal(size=(2, fgrid.n)) + 1j * rng.normal(size=(2, fgrid.n))
    end = integrate_lz_family(InnerField.create(-1.5, fgrid, f0), fake,
                              (-1.5, 2.0), 1e-3)[-1]

    def phase(s):
        return fgrid.points * s + 0.5 * s ** 2 * fake.xi0

    dphi = phase(2.0) - phase(-1.5)
    expected = np.stack([f0[0] * np.exp(-1j * dphi),
                         f0[1] * np.exp(+1j * dphi)])
    lz_err = float(np.max(np.abs(end.f - expected)))

    ok = (lens_err < 1e-6 and rabi_err < 1e-8
          and osc_err < 1e-8 and lz_err < 1e-10)
    _verdict(7, ok,
             f"lens vs direct {lens_err:.2e} (1e-6), Rabi {rabi_err:.2e} "
             f"(1e-8), const-omega {osc_err:.2e} (1e-8), c=0 family "
             f"{lz_err:.2e} (1e-10)")


def test_criterion_8_taylor_table():
    xi0, delta = 2.0, 0.1
    table = taylor_at_crossing(xi0, delta)
    p = derive_scales(1e-2, 1.0, 0.05, xi0, 0.5, 0.1, 1.0)
    assert p.delta == pytest.approx(delta)
    path = crossing_path(p, -0.02, 0.02, 1e-6)
    h = 1e-3
    ts = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * h

    def stencil(series):
        f = np.asarray(series)
        return (f[2],
                (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h),
                (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4])
                / (12 * h ** 2),
                (-f[0] + 2 * f[1] - 2 * f[3] + f[4]) / (2 * h ** 3))

    worst = 0.0
    for values, entries in ((path.x_of(ts), table.x),
                            (path.xi_of(ts), table.xi),
                            (path.S_of(ts), table.S)):
        approx = stencil(values)
        scale = max(abs(e) for e in entries)
        for got, want in zip(approx, entries):
            err = abs(got - want) / (abs(want) if want != 0.0 else scale)
            worst = max(worst, err)
    _verdict(8, worst < 1e-3,
             f"trajectory derivatives vs table, worst relative {worst:.2e} "
             f"(tol 1e-3 at xi0=2, delta=0.1, h=1e-3)")


def test_criterion_9_adiabatic_control():
    params = derive_scales(1e-3, 3.0, 0.05, 1.0, 0.5, 0.1, 1.0)
    num = NumericsConfig(n_points=8192, x_min=-2.0, x_max=2.0,
                         dt=2e-4, ode_dt=1e-4)
    report = run_experiment(params, num).report
    frac_in = report.mass_minus_before / report.total_before
    frac_out = report.mass_minus_after / report.total_after
    ok = frac_in < 1e-2 and frac_out < 1e-2
    _verdict(9, ok,
             f"lower-mode fraction {frac_in:.2e} -> {frac_out:.2e} through "
             f"the crossing (tol 1e-2, p_theory {report.p_theory:.1e})")
