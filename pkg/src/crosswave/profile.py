"""The adiabatic profile equation, solved two independent ways.

    i u_t + (1/2) u_yy - (1/2) lambda''(x(t)) y^2 u = kappa |u|^2 u

Route one: Strang split-step with the time-dependent harmonic coefficient.
Route two: lens transform onto a free cubic NLS in the variable s = mu/nu,
with effective coupling H(s) = kappa * nu(tau(s)), mapped back pointwise.
Agreement of the two routes is a cross-check of both discretizations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .classical import ClassicalPath, lens_forward, lens_inverse, solve_oscillator
from .errors import BoundaryLeakError, ConfigError, MassDriftError
from .fourier import SpatialGrid, spectral_derivative, spectral_tail_fraction
from .potential import lambda_second

LEAK_REL = 1e-6          # |u| at the box edge, relative to peak
MASS_TOL = 1e-8          # relative mass drift allowed per unit time


@dataclass(frozen=True)
class ProfileState:
    """A scalar profile sample: field u on a y-grid at profile time t."""

    t: float
    u: np.ndarray
    grid: SpatialGrid
    mass: float

    @staticmethod
    def create(t: float, u: np.ndarray, grid: SpatialGrid) -> "ProfileState":
        u = np.ascontiguousarray(u, dtype=complex)
        if u.shape != (grid.n,):
            raise ConfigError(f"profile shape {u.shape} does not match grid {grid.n}")
        return ProfileState(t=t, u=u, grid=grid, mass=grid.mass(u))


def initial_profile_gaussian(y_grid: SpatialGrid, t: float = 0.0) -> ProfileState:
    """The default profile a(y) = pi^(-1/4) exp(-y^2/2), unit L2 mass."""
    a = np.pi ** -0.25 * np.exp(-0.5 * y_grid.points ** 2)
    return ProfileState.create(t, a.astype(complex), y_grid)


def initial_profile_custom(samples: np.ndarray, y_grid: SpatialGrid,
                           t: float = 0.0) -> ProfileState:
    """Wrap user samples after checking mass and spectral health."""
    state = ProfileState.create(t, samples, y_grid)
    if state.mass < 1e-8:
        raise ConfigError(f"profile mass {state.mass:.3e} below 1e-8")
    tail = spectral_tail_fraction(state.u)
    if tail > 1e-8:
        raise ConfigError(
            f"profile spectral tail {tail:.3e} of peak: grid cannot represent it")
    _check_leak(state.u, "initial profile")
    return state


def _check_leak(u: np.ndarray, label: str) -> None:
    peak = np.abs(u).max()
    if peak == 0.0:
        return
    edge = max(np.abs(u[:2]).max(), np.abs(u[-2:]).max())
    if edge > LEAK_REL * peak:
        raise BoundaryLeakError(
            f"{label}: edge amplitude {edge:.3e} vs peak {peak:.3e}; widen the box")


def _check_mass(mass: float, mass0: float, elapsed: float, label: str) -> None:
    budget = MASS_TOL * (1.0 + abs(elapsed))
    if abs(mass - mass0) > budget * mass0:
        raise MassDriftError(
            f"{label}: mass drift {abs(mass - mass0) / mass0:.3e} "
            f"exceeds {budget:.1e} after {elapsed:.3g} time units")


def _merge_times(t0: float, t1: float, snapshot_times) -> np.ndarray:
    times = {float(t0), float(t1)}
    for t in snapshot_times or ():
        t = float(t)
        if not (min(t0, t1) - 1e-12 <= t <= max(t0, t1) + 1e-12):
            raise ConfigError(f"snapshot time {t} outside span [{t0}, {t1}]")
        times.add(t)
    return np.array(sorted(times))


def _coerce_initial(a, y_grid: SpatialGrid | None, t0: float) -> ProfileState:
    if isinstance(a, ProfileState):
        return replace(a, t=t0)
    if y_grid is None:
        raise ConfigError("array initial data needs an explicit y_grid")
    return ProfileState.create(t0, a, y_grid)


def solve_profile_direct(a, params, path: ClassicalPath, t_span, dt: float,
                         snapshot_times=None, y_grid: SpatialGrid | None = None):
    """Strang split-step for the profile equation along the given path.

    Returns ProfileStates at span ends plus any snapshot times. The harmonic
    coefficient is evaluated at each half-step's temporal midpoint, keeping
    the scheme second order; the cubic factor advances by an exact phase.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    state = _coerce_initial(a, y_grid, t0)
    if t1 == t0:
        return [state]
    if t1 < t0:
        raise ConfigError("profile solver integrates forward: t_span must ascend")
    if not path.covers(t0, t1):
        raise ConfigError(f"path does not cover [{t0}, {t1}]")
    grid = state.grid
    y2 = grid.points ** 2
    k2 = grid.wavenumbers ** 2
    # the curvature coefficient belongs to the potential the path lives in
    kappa, delta = params.kappa, path.delta
    times = _merge_times(t0, t1, snapshot_times)
    out = [state]
    u = state.u.copy()
    mass0 = state.mass
    for seg_a, seg_b in zip(times[:-1], times[1:]):
        n = max(1, math.ceil((seg_b - seg_a) / dt))
        h = (seg_b - seg_a) / n
        kinetic = np.exp(-0.5j * h * k2)
        t_first = seg_a + h * (np.arange(n) + 0.25)
        t_second = seg_a + h * (np.arange(n) + 0.75)
        om_first = lambda_second(path.x_of(t_first), delta)
        om_second = lambda_second(path.x_of(t_second), delta)
        for i in range(n):
            u *= np.exp(-0.5j * h * (0.5 * om_first[i] * y2
                                     + kappa * np.abs(u) ** 2))
            u = np.fft.ifft(np.fft.fft(u) * kinetic)
            u *= np.exp(-0.5j * h * (0.5 * om_second[i] * y2
                                     + kappa * np.abs(u) ** 2))
        snap = ProfileState.create(float(seg_b), u.copy(), grid)
        _check_mass(snap.mass, mass0, seg_b - t0, "profile (direct)")
        _check_leak(snap.u, "profile (direct)")
        out.append(snap)
    return out


def solve_profile_lens(a, params, path: ClassicalPath, t_span, dt: float,
                       snapshot_times=None, y_grid: SpatialGrid | None = None):
    """Profile evolution through the lens transform.

    The oscillator pair is anchored at the span start (tau = 0 there), the
    free cubic NLS i v_s + (1/2) v_zz = kappa nu(tau(s)) |v|^2 v is advanced
    by Strang splitting in s, and states map back at each requested time.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    state = _coerce_initial(a, y_grid, t0)
    if t1 == t0:
        return [state]
    if t1 < t0:
        raise ConfigError("profile solver integrates forward: t_span must ascend")
    if not path.covers(t0, t1):
        raise ConfigError(f"path does not cover [{t0}, {t1}]")
    grid = state.grid
    kappa = params.kappa
    # the oscillator ODE is cheap; resolve the 1/delta curvature spike well
    dt_ode = min(dt, params.delta / (20.0 * max(params.xi0, 1.0)), 1e-3)
    osc = solve_oscillator(path, t1 - t0, dt_ode, t_anchor=t0)

    times = _merge_times(t0, t1, snapshot_times)
    taus = times - t0
    s_stops = np.concatenate([[0.0], np.asarray(osc.s_of(taus[1:]), dtype=float)])
    k2 = grid.wavenumbers ** 2
    _, v = lens_forward(state.u, 0.0, osc, grid)

    out = [state]
    mass0 = state.mass
    for j in range(len(times) - 1):
        s_a, s_b = s_stops[j], s_stops[j + 1]
        # nu <= 1, so ds = dt makes the pulled-back tau steps at most dt
        n = max(1, math.ceil((s_b - s_a) / dt))
        h = (s_b - s_a) / n
        kinetic = np.exp(-0.5j * h * k2)
        if kappa != 0.0:
            s_first = s_a + h * (np.arange(n) + 0.25)
            s_second = s_a + h * (np.arange(n) + 0.75)
            cpl_first = kappa * osc.nu_of(osc.tau_of_s(s_first))
            cpl_second = kappa * osc.nu_of(osc.tau_of_s(s_second))
        for i in range(n):
            if kappa != 0.0:
                v *= np.exp(-0.5j * h * cpl_first[i] * np.abs(v) ** 2)
            v = np.fft.ifft(np.fft.fft(v) * kinetic)
            if kappa != 0.0:
                v *= np.exp(-0.5j * h * cpl_second[i] * np.abs(v) ** 2)
        tau_b = float(taus[j + 1])
        _, u_b = lens_inverse(v, float(s_b), osc, grid, tau=tau_b)
        snap = ProfileState.create(float(times[j + 1]), u_b, grid)
        _check_mass(snap.mass, mass0, times[j + 1] - t0, "profile (lens)")
        _check_leak(snap.u, "profile (lens)")
        out.append(snap)
    return out


def monitor_moments(state: ProfileState, k_max: int) -> dict:
    """Norms ||y^alpha d^beta u|| for alpha + beta <= k_max.

    The (0,0) entry is sqrt(mass); derivatives are spectral.
    """
    if k_max < 0:
        raise ConfigError("k_max must be >= 0")
    grid = state.grid
    y = grid.points
    table = {}
    derivs = {0: state.u}
    for beta in range(1, k_max + 1):
        derivs[beta] = spectral_derivative(state.u, grid, beta)
    for alpha in range(k_max + 1):
        for beta in range(k_max + 1 - alpha):
            table[(alpha, beta)] = grid.norm_l2(y ** alpha * derivs[beta])
    return table
