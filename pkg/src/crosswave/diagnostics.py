"""Mode-mass bookkeeping, convergence fits, and the end-to-end transition
experiment that ties the solvers together.

The experiment pipeline: integrate the classical path, carry the profile
from -T to -t_eps, build the polarized packet at -T, run the full solver to
-t_eps (outer-approximation error, incoming mode masses), continue across
the crossing window to +t_eps while comparing the rescaled solution against
the per-y two-level family, and read off the transferred mass fraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import crossing_path
from .errors import ConfigError, ToleranceError
from .fourier import SpatialGrid
from .inner import build_inner_data, extract_inner_field, integrate_lz_family
from .params import NumericsConfig, SemiclassicalParams, resolution_check
from .potential import project_modes
from .profile import initial_profile_gaussian, solve_profile_direct
from .semiclassical import (build_initial_data, error_norms, evolve,
                            outer_approximation)

DEFAULT_Y_GRID = SpatialGrid(1024, -32.0, 32.0)
CLOSURE_REL = 1e-10
TOTAL_REL = 1e-6


def mode_masses(psi, delta: float):
    """L2 masses carried by the two adiabatic modes."""
    plus, minus = project_modes(psi, delta)
    return (psi.grid.mass(plus), psi.grid.mass(minus))


@dataclass(frozen=True)
class ConvergenceFit:
    slope: float
    intercept: float
    residual: float
    converged: bool        # False flags "no convergence" (slope near zero)


def convergence_fit(errors) -> ConvergenceFit:
    """Least-squares fit of log(error) against log(epsilon).

    errors is a list of (epsilon, error) pairs; at least three epsilons
    spanning two decades are required for the slope to mean anything.
    """
    pairs = [(float(e), float(v)) for e, v in errors]
    if len(pairs) < 3:
        raise ConfigError("convergence fit needs at least 3 epsilon values")
    eps = np.array([e for e, _ in pairs])
    vals = np.array([v for _, v in pairs])
    if np.any(vals <= 0.0):
        raise ConfigError("convergence fit needs positive errors")
    if np.max(eps) / np.min(eps) < 99.0:
        raise ConfigError("epsilon values must span at least two decades")
    # slope in err ~ C eps^slope convention: fit log err = s log eps + b
    coef, res = np.polyfit(np.log(eps), np.log(vals), 1, full=True)[:2]
    slope, intercept = float(coef[0]), float(coef[1])
    residual = float(np.sqrt(res[0] / len(pairs))) if res.size else 0.0
    return ConvergenceFit(slope=slope, intercept=intercept, residual=residual,
                          converged=slope > 0.02)


def pick_numerics(params: SemiclassicalParams, x_min: float = -2.0,
                  x_max: float = 2.0, base: NumericsConfig | None = None
                  ) -> NumericsConfig:
    """Resolution-matched grid and steps for the given epsilon.

    Eight points per oscillation wavelength 2 pi eps / xi0, thirty-two
    across the packet width sqrt(eps); dt scales with eps so the kinetic
    phase advanced per step at the packet wavenumber stays fixed.
    """
    length = x_max - x_min
    need = max(8.0 * length * params.xi0 / (2.0 * math.pi * params.epsilon),
               32.0 * length / math.sqrt(params.epsilon))
    n = 16
    while n < need:
        n *= 2
    dt = params.epsilon / 5.0
    kwargs = dict(n_points=n, x_min=x_min, x_max=x_max, dt=dt, ode_dt=1e-4)
    if base is not None:
        kwargs["lz_horizon"] = base.lz_horizon
        kwargs["tolerances"] = base.tolerances
    return NumericsConfig(**kwargs)


@dataclass(frozen=True)
class TransitionReport:
    params: SemiclassicalParams
    num: NumericsConfig
    mass_plus_before: float
    mass_minus_before: float
    mass_plus_after: float
    mass_minus_after: float
    p_theory: float
    p_measured: float
    rel_error: float
    degraded: bool
    outer_l2: float
    outer_h1: float
    inner_errors: tuple        # ((s, ||v - f||_L2), ...)

    @property
    def inner_sup(self) -> float:
        return max(e for _, e in self.inner_errors) if self.inner_errors else 0.0

    @property
    def total_before(self) -> float:
        return self.mass_plus_before + self.mass_minus_before

    @property
    def total_after(self) -> float:
        return self.mass_plus_after + self.mass_minus_after

    def rows(self):
        """Flat key/value view, CSV- and report-friendly."""
        items = [("epsilon", self.params.epsilon), ("c", self.params.c),
                 ("kappa", self.params.kappa), ("xi0", self.params.xi0),
                 ("T", self.params.T), ("gamma", self.params.gamma),
                 ("c0", self.params.c0), ("delta", self.params.delta),
                 ("t_eps", self.params.t_eps), ("s_eps", self.params.s_eps),
                 ("n_points", self.num.n_points), ("dt", self.num.dt),
                 ("mass_plus_before", self.mass_plus_before),
                 ("mass_minus_before", self.mass_minus_before),
                 ("mass_plus_after", self.mass_plus_after),
                 ("mass_minus_after", self.mass_minus_after),
                 ("p_theory", self.p_theory),
                 ("p_measured", self.p_measured),
                 ("rel_error", self.rel_error),
                 ("outer_l2", self.outer_l2),
                 ("outer_h1", self.outer_h1),
                 ("inner_sup", self.inner_sup),
                 ("degraded", int(self.degraded))]
        return items


@dataclass(frozen=True)
class ExperimentBundle:
    """Everything a mode driver may want from one pipeline run."""

    report: TransitionReport
    outer_series: tuple        # ((t, l2, h1), ...) on [-T, -t_eps]
    inner_trajectory: tuple    # InnerField snapshots of the model family
    mass_series: tuple


def _check_closure(m_plus, m_minus, total, where):
    if abs(m_plus + m_minus - total) > CLOSURE_REL * total:
        raise ToleranceError(
            f"mode masses do not close at {where}: "
            f"{m_plus + m_minus:.15e} vs {total:.15e}")


def run_experiment(params: SemiclassicalParams, num: NumericsConfig,
                   outer_samples: int = 5, inner_samples: int = 9,
                   y_grid: SpatialGrid = DEFAULT_Y_GRID) -> ExperimentBundle:
    """Full pipeline; landau_zener_experiment is the report-only wrapper."""
    degraded = not resolution_check(params, num).ok
    grid = SpatialGrid(num.n_points, num.x_min, num.x_max)
    slack = 0.05 * params.T
    path = crossing_path(params, -params.T - slack, params.t_eps + slack,
                         num.ode_dt)

    t_in = -params.t_eps
    outer_times = list(np.linspace(-params.T, t_in, max(outer_samples, 2)))
    profile_states = solve_profile_direct(
        initial_profile_gaussian(y_grid, t=-params.T), params, path,
        (-params.T, t_in), num.dt, snapshot_times=outer_times[1:-1])
    by_time = {round(st.t, 12): st for st in profile_states}

    psi0 = build_initial_data(profile_states[0], params, path, grid)
    run_in = evolve(psi0, params, (-params.T, t_in), num.dt,
                    snapshot_times=outer_times[1:-1])
    outer_series = []
    for t in outer_times:
        psi_t = run_in.at(t)
        approx = outer_approximation(t, params, path, by_time[round(t, 12)], grid)
        l2, h1 = error_norms(psi_t, approx, params.epsilon)
        outer_series.append((t, l2, h1))

    psi_in = run_in.final
    m_plus_b, m_minus_b = mode_masses(psi_in, params.delta)
    _check_closure(m_plus_b, m_minus_b, psi_in.mass, "-t_eps")

    s_samples = np.linspace(-params.s_eps, params.s_eps, inner_samples)
    t_samples = [s * math.sqrt(params.epsilon) for s in s_samples]
    run_cross = evolve(psi_in, params, (t_in, params.t_eps), num.dt,
                       snapshot_times=t_samples[1:-1])
    match = build_inner_data(profile_states[-1], params, path, y_grid)
    family = integrate_lz_family(match.field, params,
                                 (-params.s_eps, params.s_eps),
                                 min(1e-3, num.dt / math.sqrt(params.epsilon)),
                                 snapshot_s=list(s_samples[1:-1]))
    inner_errors = []
    for s, t, f_model in zip(s_samples, t_samples, family):
        v_eps = extract_inner_field(run_cross.at(t), params, t, y_grid)
        inner_errors.append((float(s), y_grid.norm_l2(v_eps.f - f_model.f)))

    psi_out = run_cross.final
    m_plus_a, m_minus_a = mode_masses(psi_out, params.delta)
    _check_closure(m_plus_a, m_minus_a, psi_out.mass, "+t_eps")
    total_b = m_plus_b + m_minus_b
    total_a = m_plus_a + m_minus_a
    if abs(total_a - total_b) > TOTAL_REL * total_b:
        raise ToleranceError(
            f"total mass moved across the window: {total_b:.12e} -> {total_a:.12e}")

    p_theory = math.exp(-math.pi * params.c ** 2 / params.xi0)
    p_measured = m_minus_a / total_a
    report = TransitionReport(
        params=params, num=num,
        mass_plus_before=m_plus_b, mass_minus_before=m_minus_b,
        mass_plus_after=m_plus_a, mass_minus_after=m_minus_a,
        p_theory=p_theory, p_measured=p_measured,
        rel_error=abs(p_measured - p_theory) / p_theory,
        degraded=degraded,
        outer_l2=outer_series[-1][1], outer_h1=outer_series[-1][2],
        inner_errors=tuple(inner_errors))
    return ExperimentBundle(report=report, outer_series=tuple(outer_series),
                            inner_trajectory=tuple(family),
                            mass_series=tuple(run_in.mass_series
                                              + run_cross.mass_series))


def landau_zener_experiment(params: SemiclassicalParams,
                            num: NumericsConfig) -> TransitionReport:
    """One crossing experiment; see run_experiment for the pipeline."""
    return run_experiment(params, num).report


def convergence_sweep(params: SemiclassicalParams, epsilons,
                      x_min: float = -2.0, x_max: float = 2.0):
    """Outer/inner error pairs across an epsilon sweep at matched physics.

    Returns (outer_pairs, inner_pairs) as lists of (epsilon, error) suitable
    for convergence_fit: outer uses the L2 + eps-weighted H1 sum at -t_eps,
    inner the sup of ||v - f|| over the crossing window.
    """
    outer_pairs = []
    inner_pairs = []
    for eps in sorted(epsilons, reverse=True):
        p = params.with_epsilon(float(eps))
        num = pick_numerics(p, x_min, x_max)
        bundle = run_experiment(p, num)
        rep = bundle.report
        outer_pairs.append((p.epsilon, rep.outer_l2 + rep.outer_h1))
        inner_pairs.append((p.epsilon, rep.inner_sup))
    return outer_pairs, inner_pairs
