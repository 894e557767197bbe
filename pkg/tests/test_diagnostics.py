"""Mode-mass bookkeeping, convergence fits, and the experiment driver."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crosswave.diagnostics import (ConvergenceFit, convergence_fit,
                                   landau_zener_experiment, mode_masses,
                                   pick_numerics, run_experiment,
                                   convergence_sweep)
from crosswave.errors import ConfigError
from crosswave.fourier import SpatialGrid
from crosswave.params import derive_scales
from crosswave.potential import eigenpair
from crosswave.semiclassical import SpinorField


def make_params(eps=1e-2, c=1.0, kappa=0.05, xi0=2.0):
    return derive_scales(eps, c, kappa, xi0, 0.5, 0.1, 1.0)


def envelope_field(grid, delta, weights):
    """Gaussian envelope distributed over the two modes with given weights."""
    x = grid.points
    g = np.exp(-0.5 * (x / 0.3) ** 2).astype(complex)
    pair = eigenpair(x, delta)
    values = weights[0] * pair.chi_plus * g + weights[1] * pair.chi_minus * g
    return SpinorField.create(grid, values)


class TestModeMasses:
    GRID = SpatialGrid(1024, -4.0, 4.0)

    def test_polarized_data_lands_in_one_mode(self):
        psi = envelope_field(self.GRID, 0.1, (1.0, 0.0))
        m_plus, m_minus = mode_masses(psi, 0.1)
        assert m_minus < 1e-28
        g_mass = self.GRID.mass(np.exp(-0.5 * (self.GRID.points / 0.3) ** 2))
        assert abs(m_plus - g_mass) < 1e-12 * g_mass

    def test_equal_superposition_splits_evenly(self):
        psi = envelope_field(self.GRID, 0.1, (1.0 / math.sqrt(2),
                                              1.0 / math.sqrt(2)))
        m_plus, m_minus = mode_masses(psi, 0.1)
        assert abs(m_plus - m_minus) < 1e-14
        assert abs(m_plus + m_minus - psi.mass) < 1e-12 * psi.mass

    def test_masses_close_for_random_data(self):
        rng = np.random.default_rng(7)
        values = rng.normal(size=(2, self.GRID.n)) \
            + 1j * rng.normal(size=(2, self.GRID.n))
        psi = SpinorField.create(self.GRID, values)
        m_plus, m_minus = mode_masses(psi, 0.3)
        assert abs(m_plus + m_minus - psi.mass) < 1e-10 * psi.mass


class TestConvergenceFit:
    def test_exact_power_law_recovered(self):
        pairs = [(e, 3.7 * e ** 0.1) for e in (1e-2, 1e-3, 1e-4)]
        fit = convergence_fit(pairs)
        assert isinstance(fit, ConvergenceFit)
        assert abs(fit.slope - 0.1) < 1e-9
        assert abs(fit.intercept - math.log(3.7)) < 1e-9
        assert fit.residual < 1e-9
        assert fit.converged

    @settings(max_examples=30, deadline=None)
    @given(slope=st.floats(0.05, 1.0), scale=st.floats(0.1, 10.0))
    def test_power_law_family(self, slope, scale):
        pairs = [(e, scale * e ** slope)
                 for e in (1e-1, 1e-2, 1e-3, 1e-4)]
        fit = convergence_fit(pairs)
        assert abs(fit.slope - slope) < 1e-8
        assert fit.converged

    def test_noisy_slope_within_band(self):
        rng = np.random.default_rng(42)
        pairs = [(e, e ** 0.3 * (1.0 + 0.01 * rng.standard_normal()))
                 for e in (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)]
        fit = convergence_fit(pairs)
        assert abs(fit.slope - 0.3) < 0.02
        assert fit.residual < 0.05

    def test_flat_errors_flag_no_convergence(self):
        pairs = [(e, 0.5) for e in (1e-2, 1e-3, 1e-4)]
        fit = convergence_fit(pairs)
        assert abs(fit.slope) < 1e-12
        assert not fit.converged

    def test_too_few_points_rejected(self):
        with pytest.raises(ConfigError, match="at least 3"):
            convergence_fit([(1e-2, 0.1), (1e-4, 0.01)])

    def test_nonpositive_errors_rejected(self):
        with pytest.raises(ConfigError, match="positive"):
            convergence_fit([(1e-2, 0.1), (1e-3, 0.0), (1e-4, 0.01)])

    def test_narrow_span_rejected(self):
        with pytest.raises(ConfigError, match="two decades"):
            convergence_fit([(1e-2, 0.1), (5e-3, 0.08), (1e-3, 0.05)])


class TestPickNumerics:
    def test_packet_constraint_dominates_at_large_epsilon(self):
        num = pick_numerics(make_params(1e-2))
        # 32 * 4 / 0.1 = 1280 beats the oscillation count here
        assert num.n_points == 2048
        assert num.dt == pytest.approx(2e-3)

    def test_oscillation_constraint_dominates_at_small_epsilon(self):
        num = pick_numerics(make_params(1e-3))
        # 8 * 4 * 2 / (2 pi 1e-3) = 10186 -> next power of two
        assert num.n_points == 16384
        assert num.dt == pytest.approx(2e-4)

    def test_intermediate_epsilon(self):
        num = pick_numerics(make_params(3e-3))
        assert num.n_points == 4096

    def test_domain_is_configurable(self):
        num = pick_numerics(make_params(1e-2), x_min=-1.0, x_max=1.0)
        assert num.x_min == -1.0 and num.x_max == 1.0
        assert num.n_points == 1024


@pytest.fixture(scope="module")
def bundle():
    p = make_params(1e-2)
    return run_experiment(p, pick_numerics(p)), p


class TestExperiment:
    def test_report_fields_are_sane(self, bundle):
        b, p = bundle
        r = b.report
        assert r.p_theory == pytest.approx(math.exp(-math.pi / 2))
        assert 0.0 <= r.p_measured <= 1.0
        assert r.rel_error == pytest.approx(
            abs(r.p_measured - r.p_theory) / r.p_theory)
        assert not r.degraded
        # incoming data rides the upper mode almost entirely
        assert r.mass_minus_before < 1e-2 * r.total_before
        assert abs(r.total_after - r.total_before) < 1e-6 * r.total_before

    def test_measured_fraction_near_theory_even_at_coarse_epsilon(self, bundle):
        b, _ = bundle
        # eps = 1e-2 is far from asymptotic, 20 percent is generous
        assert b.report.rel_error < 0.2

    def test_outer_series_starts_exact_and_grows(self, bundle):
        b, p = bundle
        times = [t for t, _, _ in b.outer_series]
        assert times[0] == pytest.approx(-p.T)
        assert times[-1] == pytest.approx(-p.t_eps)
        assert b.outer_series[0][1] == 0.0
        assert b.outer_series[-1][1] > b.outer_series[1][1]
        assert b.report.outer_l2 == b.outer_series[-1][1]
        assert b.report.outer_h1 == b.outer_series[-1][2]

    def test_inner_errors_are_bounded(self, bundle):
        b, p = bundle
        s_values = [s for s, _ in b.report.inner_errors]
        assert s_values[0] == pytest.approx(-p.s_eps)
        assert s_values[-1] == pytest.approx(p.s_eps)
        assert all(e < 1.0 for _, e in b.report.inner_errors)
        assert b.report.inner_sup == max(e for _, e in b.report.inner_errors)

    def test_rows_echo_the_run(self, bundle):
        b, p = bundle
        rows = dict(b.report.rows())
        assert len(rows) == len(b.report.rows())
        assert rows["epsilon"] == p.epsilon
        assert rows["p_measured"] == b.report.p_measured
        assert rows["n_points"] == 2048
        assert rows["degraded"] == 0

    def test_runs_are_deterministic(self, bundle):
        b, p = bundle
        again = run_experiment(p, pick_numerics(p))
        assert again.report.p_measured == b.report.p_measured
        assert again.report.outer_l2 == b.report.outer_l2
        assert again.report.inner_errors == b.report.inner_errors

    def test_report_wrapper_matches_bundle(self, bundle):
        b, p = bundle
        rep = landau_zener_experiment(p, pick_numerics(p))
        assert rep.p_measured == b.report.p_measured


class TestSweep:
    def test_two_point_sweep_orders_and_improves(self):
        p = make_params(1e-2)
        outer, inner = convergence_sweep(p, [3e-3, 1e-2])
        assert [e for e, _ in outer] == [1e-2, 3e-3]
        assert outer[1][1] < outer[0][1]
        assert inner[1][1] < inner[0][1]
        assert all(v > 0 for _, v in outer + inner)
