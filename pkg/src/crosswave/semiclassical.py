"""Full solver for the coupled two-component cubic NLS and the outer
(coherent-state) approximation.

The equation, after dividing the semiclassical form by epsilon, is

    i psi_t = -(eps/2) psi_xx + (1/eps) V(x) psi + kappa sqrt(eps) |psi|^2 psi

with |psi|^2 the C^2-norm squared. The split-step advances kinetic and
potential+cubic factors separately; the potential+cubic sub-step is exact
because |psi|^2 is invariant under both the unitary 2x2 propagator and the
scalar cubic phase, so the only discretization error is the kinetic/potential
splitting itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import ClassicalPath
from .errors import BoundaryLeakError, ConfigError, MassDriftError, ResolutionError
from .fourier import SpatialGrid, resample_uniform, spectral_derivative
from .params import NumericsConfig, SemiclassicalParams, resolution_check
from .potential import eigenpair
from .profile import ProfileState

LEAK_REL = 1e-6
MASS_TOL = 1e-8


@dataclass(frozen=True)
class SpinorField:
    """Two-component complex field on a spatial grid."""

    grid: SpatialGrid
    values: np.ndarray     # shape (2, n)

    @staticmethod
    def create(grid: SpatialGrid, values: np.ndarray) -> "SpinorField":
        values = np.ascontiguousarray(values, dtype=complex)
        if values.shape != (2, grid.n):
            raise ConfigError(f"spinor shape {values.shape}, expected (2, {grid.n})")
        if not np.all(np.isfinite(values.view(float))):
            raise ConfigError("spinor field contains non-finite values")
        return SpinorField(grid=grid, values=values)

    @property
    def mass(self) -> float:
        return self.grid.mass(self.values)

    def mass_density(self) -> np.ndarray:
        return np.abs(self.values[0]) ** 2 + np.abs(self.values[1]) ** 2

    def centroid(self) -> float:
        rho = self.mass_density()
        return float(np.sum(self.grid.points * rho) / np.sum(rho))


def _grid_resolution_guard(params: SemiclassicalParams, grid: SpatialGrid) -> None:
    num = NumericsConfig(n_points=grid.n, x_min=grid.x_min, x_max=grid.x_max)
    rep = resolution_check(params, num)
    if not rep.ok:
        raise ResolutionError(
            "grid cannot resolve " + ", ".join(rep.failed_names()))


def coherent_state(profile: ProfileState, params: SemiclassicalParams,
                   path: ClassicalPath, grid: SpatialGrid, t: float) -> SpinorField:
    """The WKB packet built from a profile sample and the path data at time t.

    eps^(-1/4) u((x - x(t))/sqrt(eps)) e^{i(S(t) + xi(t)(x - x(t)))/eps}
    chi_plus(x). Band-limited resampling maps the y-grid onto the packet
    frame; arguments outside the y-box are zeroed (the profile is localized).
    """
    eps = params.epsilon
    root = math.sqrt(eps)
    xc = float(path.x_of(t))
    xic = float(path.xi_of(t))
    Sc = float(path.S_of(t))
    y_grid = profile.grid
    y_args = (grid.points - xc) / root
    u_vals = resample_uniform(profile.u, y_grid, (grid.x_min - xc) / root,
                              grid.dx / root, grid.n)
    outside = (y_args < y_grid.x_min) | (y_args >= y_grid.x_max)
    u_vals[outside] = 0.0
    phase = np.exp(1j * (Sc + xic * (grid.points - xc)) / eps)
    pair = eigenpair(grid.points, params.delta)
    scalar = eps ** -0.25 * u_vals * phase
    return SpinorField.create(grid, scalar * pair.chi_plus)


def build_initial_data(a: ProfileState, params: SemiclassicalParams,
                       path: ClassicalPath, grid: SpatialGrid,
                       t: float | None = None) -> SpinorField:
    """Coherent-state data polarized along chi_plus at t (default -T)."""
    _grid_resolution_guard(params, grid)
    if t is None:
        t = -params.T
    psi = coherent_state(a, params, path, grid, t)
    if abs(psi.mass - a.mass) > 1e-6 * a.mass:
        raise ResolutionError(
            f"packet mass {psi.mass:.9f} vs profile mass {a.mass:.9f}: "
            "grid too coarse for the packet")
    return psi


def outer_approximation(t: float, params: SemiclassicalParams,
                        path: ClassicalPath, profile_u: ProfileState,
                        grid: SpatialGrid) -> SpinorField:
    """The adiabatic approximation, valid on [-T, -t_eps]."""
    if t > -params.t_eps + 1e-12:
        raise ConfigError(
            f"outer approximation invalid at t={t}: window is [-T, {-params.t_eps}]")
    if abs(profile_u.t - t) > 1e-9:
        raise ConfigError(f"profile sampled at {profile_u.t}, requested t={t}")
    return coherent_state(profile_u, params, path, grid, t)


def error_norms(psi: SpinorField, approx: SpinorField, epsilon: float):
    """(L2, eps-weighted H1) norms of the difference field."""
    if psi.grid != approx.grid:
        raise ConfigError("fields live on different grids")
    w = psi.values - approx.values
    l2 = psi.grid.norm_l2(w)
    h1 = psi.grid.norm_l2(epsilon * spectral_derivative(w, psi.grid))
    return l2, h1


@dataclass(frozen=True)
class EvolveResult:
    times: tuple
    fields: tuple          # SpinorField at each time
    mass_series: tuple

    @property
    def final(self) -> SpinorField:
        return self.fields[-1]

    def at(self, t: float) -> SpinorField:
        for ti, fi in zip(self.times, self.fields):
            if abs(ti - t) <= 1e-12 * max(1.0, abs(t)):
                return fi
        raise KeyError(f"no snapshot at t={t}; have {self.times}")


def evolve(psi: SpinorField, params: SemiclassicalParams, t_span, dt: float,
           snapshot_times=None, potential_x: np.ndarray | None = None,
           boundary_check: bool = True) -> EvolveResult:
    """Strang split-step for the coupled system.

    Returns snapshots at span ends plus requested times. potential_x
    overrides the positions fed to V (e.g. a constant array freezes the
    potential for oracle runs). boundary_check=False disables the leak
    monitor for deliberately delocalized data.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if t1 < t0:
        raise ConfigError("evolve integrates forward: t_span must ascend")
    grid = psi.grid
    eps = params.epsilon
    delta = params.delta
    nl = params.kappa * math.sqrt(eps)
    x_pot = grid.points if potential_x is None else np.asarray(potential_x, float)
    if x_pot.shape != (grid.n,):
        raise ConfigError("potential_x must match the grid")
    r = np.hypot(x_pot, delta)

    times = [t0]
    for t in snapshot_times or ():
        t = float(t)
        if not (t0 - 1e-12 <= t <= t1 + 1e-12):
            raise ConfigError(f"snapshot time {t} outside span [{t0}, {t1}]")
        times.append(t)
    times.append(t1)
    times = sorted(set(times))

    out_fields = [psi]
    out_mass = [psi.mass]
    mass0 = out_mass[0]
    p1 = psi.values[0].copy()
    p2 = psi.values[1].copy()
    k2 = grid.wavenumbers ** 2
    for seg_a, seg_b in zip(times[:-1], times[1:]):
        if seg_b == seg_a:
            continue
        n = max(1, math.ceil((seg_b - seg_a) / dt))
        h = (seg_b - seg_a) / n
        ang = (0.5 * h / eps) * r
        cos_a = np.cos(ang)
        sl = np.sin(ang) / r
        slx = sl * x_pot
        sld = sl * delta
        kinetic = np.exp(-0.5j * eps * h * k2)
        half_nl = 0.5 * h * nl
        for _ in range(n):
            if nl != 0.0:
                ph = np.exp(-1j * half_nl * (np.abs(p1) ** 2 + np.abs(p2) ** 2))
                p1 *= ph
                p2 *= ph
            q1 = cos_a * p1 - 1j * (slx * p1 + sld * p2)
            q2 = cos_a * p2 - 1j * (sld * p1 - slx * p2)
            p1 = np.fft.ifft(np.fft.fft(q1) * kinetic)
            p2 = np.fft.ifft(np.fft.fft(q2) * kinetic)
            q1 = cos_a * p1 - 1j * (slx * p1 + sld * p2)
            q2 = cos_a * p2 - 1j * (sld * p1 - slx * p2)
            if nl != 0.0:
                ph = np.exp(-1j * half_nl * (np.abs(q1) ** 2 + np.abs(q2) ** 2))
                q1 *= ph
                q2 *= ph
            p1, p2 = q1, q2
        field = SpinorField.create(grid, np.stack([p1, p2]))
        mass = field.mass
        budget = MASS_TOL * (1.0 + abs(seg_b - t0))
        if abs(mass - mass0) > budget * mass0:
            raise MassDriftError(
                f"mass drift {abs(mass - mass0) / mass0:.3e} at t={seg_b:.6g}")
        if boundary_check:
            dens = np.sqrt(field.mass_density())
            peak = dens.max()
            edge = max(dens[:2].max(), dens[-2:].max())
            if peak > 0 and edge > LEAK_REL * peak:
                raise BoundaryLeakError(
                    f"edge amplitude {edge:.3e} vs peak {peak:.3e} at t={seg_b:.6g}")
        out_fields.append(field)
        out_mass.append(mass)
    return EvolveResult(times=tuple(times), fields=tuple(out_fields),
                        mass_series=tuple(out_mass))
