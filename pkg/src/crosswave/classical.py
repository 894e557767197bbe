"""Classical trajectories on an eigenvalue branch, the crossing Taylor data,
the mu/nu oscillator pair, and the lens change of variables.

The Hamiltonian is H(x, xi) = xi^2/2 + branch * sqrt(x^2 + delta^2); all
integrators are fixed-step RK4 with conservation guards, so that a path is a
reproducible function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline, PchipInterpolator

from .errors import EnergyDriftError, HorizonError, WronskianError
from .fourier import SpatialGrid, resample_uniform
from .potential import lambda_second


@dataclass
class ClassicalPath:
    """Dense samples of (t, x, xi, S) along one branch, time ascending."""

    branch: int
    delta: float
    t: np.ndarray
    x: np.ndarray
    xi: np.ndarray
    S: np.ndarray

    def __post_init__(self):
        if self.branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")
        if not np.all(np.diff(self.t) > 0):
            raise ValueError("path samples must be strictly increasing in t")

    @cached_property
    def _x_spline(self):
        return CubicSpline(self.t, self.x)

    @cached_property
    def _xi_spline(self):
        return CubicSpline(self.t, self.xi)

    @cached_property
    def _S_spline(self):
        return CubicSpline(self.t, self.S)

    def x_of(self, t):
        return self._x_spline(t)

    def xi_of(self, t):
        return self._xi_spline(t)

    def S_of(self, t):
        return self._S_spline(t)

    def energy(self) -> np.ndarray:
        return 0.5 * self.xi ** 2 + self.branch * np.hypot(self.x, self.delta)

    def covers(self, t0: float, t1: float, slack: float = 1e-9) -> bool:
        lo, hi = min(t0, t1), max(t0, t1)
        return self.t[0] <= lo + slack and hi <= self.t[-1] + slack


def _rk4_hamilton(x0, xi0, S0, delta, branch, h, n):
    """n fixed RK4 steps of the autonomous system (x, xi, S)."""
    out = np.empty((n + 1, 3))
    out[0] = (x0, xi0, S0)
    x, xi, S = float(x0), float(xi0), float(S0)

    def rhs(x, xi):
        r = math.hypot(x, delta)
        return xi, -branch * x / r, 0.5 * xi * xi - branch * r

    for i in range(n):
        k1 = rhs(x, xi)
        k2 = rhs(x + 0.5 * h * k1[0], xi + 0.5 * h * k1[1])
        k3 = rhs(x + 0.5 * h * k2[0], xi + 0.5 * h * k2[1])
        k4 = rhs(x + h * k3[0], xi + h * k3[1])
        x += h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        xi += h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        S += h / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        out[i + 1] = (x, xi, S)
    return out


def integrate_trajectory(x0: float, xi0: float, delta: float, branch: int,
                         t_start: float, t_end: float, dt: float) -> ClassicalPath:
    """Integrate xdot = xi, xidot = -d/dx lambda^branch, Sdot = xi^2/2 - lambda.

    Fixed-step RK4; t_end < t_start integrates backward. Samples are returned
    in ascending time order either way. The energy xi^2/2 + lambda(x) must
    stay within 1e-6 relative drift or the step size is rejected; a resolved
    run sits near 1e-10.
    """
    if delta <= 0 or dt <= 0:
        raise ValueError("delta and dt must be positive")
    span = t_end - t_start
    if span == 0.0:
        t = np.array([t_start])
        return ClassicalPath(branch, delta, t, np.array([float(x0)]),
                             np.array([float(xi0)]), np.array([0.0]))
    n = max(1, math.ceil(abs(span) / dt))
    h = span / n
    states = _rk4_hamilton(x0, xi0, 0.0, delta, branch, h, n)
    t = t_start + h * np.arange(n + 1)
    if span < 0:
        t = t[::-1]
        states = states[::-1]
    path = ClassicalPath(branch, delta, t, states[:, 0].copy(),
                         states[:, 1].copy(), states[:, 2].copy())
    e = path.energy()
    scale = max(abs(e[0]), 1e-12)
    drift = np.abs(e - e[0]).max() / scale
    if drift > 1e-6:
        raise EnergyDriftError(
            f"energy drift {drift:.3e} over [{t_start}, {t_end}]; "
            f"dt={dt} too coarse for delta={delta}")
    return path


def crossing_path(params, t_min: float, t_max: float, dt: float) -> ClassicalPath:
    """Upper-branch trajectory through the crossing: x(0)=0, xi(0)=xi0.

    Built by integrating backward to t_min and forward to t_max from the
    shared initial condition, so S(0) = 0 lands exactly on a sample.
    """
    if not (t_min <= 0.0 <= t_max):
        raise ValueError("crossing path needs t_min <= 0 <= t_max")
    parts = []
    if t_min < 0:
        parts.append(integrate_trajectory(0.0, params.xi0, params.delta, +1,
                                          0.0, t_min, dt))
    if t_max > 0:
        parts.append(integrate_trajectory(0.0, params.xi0, params.delta, +1,
                                          0.0, t_max, dt))
    if len(parts) == 2:
        back, fwd = parts
        t = np.concatenate([back.t[:-1], fwd.t])
        x = np.concatenate([back.x[:-1], fwd.x])
        xi = np.concatenate([back.xi[:-1], fwd.xi])
        S = np.concatenate([back.S[:-1], fwd.S])
        return ClassicalPath(+1, params.delta, t, x, xi, S)
    return parts[0]


@dataclass(frozen=True)
class TaylorTable:
    """Derivatives of (x, xi, S) at t=0, orders 0..3, closed form."""

    x: tuple
    xi: tuple
    S: tuple


def taylor_at_crossing(xi0: float, delta: float) -> TaylorTable:
    if xi0 <= 0 or delta <= 0:
        raise ValueError("xi0 and delta must be positive")
    return TaylorTable(
        x=(0.0, xi0, 0.0, -xi0 / delta),
        xi=(xi0, 0.0, -xi0 / delta, 0.0),
        S=(0.0, 0.5 * xi0 ** 2 - delta, 0.0, -2.0 * xi0 ** 2 / delta),
    )


def curvature_integral(path: ClassicalPath, t: float, n_quad: int = 2048) -> float:
    """integral of lambda''(x(s)) ds between 0 and t (positive integrand).

    The diagnostic interest is its boundedness uniformly in delta; composite
    Simpson on the path spline is plenty for a 1e-6 comparison.
    """
    if t == 0.0:
        return 0.0
    lo, hi = (t, 0.0) if t < 0 else (0.0, t)
    if not path.covers(lo, hi):
        raise ValueError(f"path does not cover [0, {t}]")
    s = np.linspace(lo, hi, n_quad + 1)
    return float(simpson(lambda_second(path.x_of(s), path.delta), x=s))


@dataclass
class OscillatorPair:
    """Samples of the fundamental pair mu, nu of r'' + Omega(tau) r = 0.

    tau is the oscillator clock: tau = 0 at the anchor time (profile time
    t_anchor), where (mu, nu, mu', nu') = (0, 1, 1, 0). The ratio s = mu/nu
    is strictly increasing while nu > 0 and serves as the lens time.
    """

    t: np.ndarray
    mu: np.ndarray
    nu: np.ndarray
    mu_dot: np.ndarray
    nu_dot: np.ndarray
    T0: float
    delta: float
    t_anchor: float = 0.0

    @cached_property
    def _splines(self):
        return {name: CubicSpline(self.t, getattr(self, name))
                for name in ("mu", "nu", "mu_dot", "nu_dot")}

    def mu_of(self, t):
        return self._splines["mu"](t)

    def nu_of(self, t):
        return self._splines["nu"](t)

    def mu_dot_of(self, t):
        return self._splines["mu_dot"](t)

    def nu_dot_of(self, t):
        return self._splines["nu_dot"](t)

    @cached_property
    def _s_spline(self):
        return CubicSpline(self.t, self.mu / self.nu)

    def s_of(self, t):
        return self._s_spline(t)

    @cached_property
    def _tau_of_s(self):
        # monotone inverse of s = mu/nu; pchip keeps it monotone
        return PchipInterpolator(self.mu / self.nu, self.t)

    def tau_of_s(self, s):
        return self._tau_of_s(s)

    @property
    def s_max(self) -> float:
        return float(self.mu[-1] / self.nu[-1])

    def wronskian(self) -> np.ndarray:
        return self.mu_dot * self.nu - self.nu_dot * self.mu


def _integrate_oscillator(path: ClassicalPath, T0: float, dt: float,
                          t_anchor: float) -> OscillatorPair:
    if T0 <= 0 or dt <= 0:
        raise ValueError("T0 and dt must be positive")
    if not path.covers(t_anchor, t_anchor + T0):
        raise ValueError("path does not cover the oscillator span")
    n = max(1, math.ceil(T0 / dt))
    h = T0 / n
    # Omega at all half-step points, evaluated once
    taus = np.linspace(0.0, T0, 2 * n + 1)
    omega = lambda_second(path.x_of(t_anchor + taus), path.delta)
    out = np.empty((n + 1, 4))
    out[0] = (0.0, 1.0, 1.0, 0.0)   # mu, mu_dot, nu, nu_dot
    mu, mud, nu, nud = out[0]
    for i in range(n):
        w0, w1, w2 = omega[2 * i], omega[2 * i + 1], omega[2 * i + 2]
        # RK4 for (r, rdot)' = (rdot, -Omega r), both columns at once
        for j, (r, rd) in enumerate(((mu, mud), (nu, nud))):
            k1r, k1d = rd, -w0 * r
            k2r, k2d = rd + 0.5 * h * k1d, -w1 * (r + 0.5 * h * k1r)
            k3r, k3d = rd + 0.5 * h * k2d, -w1 * (r + 0.5 * h * k2r)
            k4r, k4d = rd + h * k3d, -w2 * (r + h * k3r)
            r += h / 6.0 * (k1r + 2 * k2r + 2 * k3r + k4r)
            rd += h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d)
            if j == 0:
                mu, mud = r, rd
            else:
                nu, nud = r, rd
        out[i + 1] = (mu, mud, nu, nud)
    pair = OscillatorPair(t=np.linspace(0.0, T0, n + 1), mu=out[:, 0].copy(),
                          nu=out[:, 2].copy(), mu_dot=out[:, 1].copy(),
                          nu_dot=out[:, 3].copy(), T0=T0, delta=path.delta,
                          t_anchor=t_anchor)
    werr = np.abs(pair.wronskian() - 1.0).max()
    if werr > 1e-8:
        raise WronskianError(f"Wronskian drift {werr:.3e}; dt={dt} too coarse")
    return pair


def solve_oscillator(path: ClassicalPath, T0: float, dt: float,
                     t_anchor: float = 0.0) -> OscillatorPair:
    """Fundamental pair of r'' + lambda''(x(t_anchor + tau)) r = 0 on [0, T0].

    Aborts if nu falls below 1e-3: the lens transform built on this pair
    would be near-singular, signalling T0 larger than the validity horizon.
    """
    pair = _integrate_oscillator(path, T0, dt, t_anchor)
    if pair.nu.min() < 1e-3:
        raise HorizonError(
            f"nu reached {pair.nu.min():.3e} before tau={T0}; "
            "shrink the horizon (see select_horizon)")
    if np.any(np.diff(pair.mu / pair.nu) <= 0):
        raise WronskianError("mu/nu not strictly increasing; integration unreliable")
    return pair


def select_horizon(path: ClassicalPath, T_max: float, dt: float,
                   t_anchor: float = 0.0, nu_floor: float = 0.5) -> OscillatorPair:
    """Largest horizon T0 <= T_max on which nu stays >= nu_floor.

    Truncates the integrated pair at the last sample before nu first dips
    below the floor.
    """
    pair = _integrate_oscillator(path, T_max, dt, t_anchor)
    below = np.nonzero(pair.nu < nu_floor)[0]
    if below.size == 0:
        return pair
    cut = below[0]
    if cut < 2:
        raise HorizonError(f"nu < {nu_floor} immediately; no usable horizon")
    sl = slice(0, cut)
    return OscillatorPair(t=pair.t[sl].copy(), mu=pair.mu[sl].copy(),
                          nu=pair.nu[sl].copy(), mu_dot=pair.mu_dot[sl].copy(),
                          nu_dot=pair.nu_dot[sl].copy(),
                          T0=float(pair.t[cut - 1]), delta=pair.delta,
                          t_anchor=t_anchor)


def _mask_outside(values: np.ndarray, targets: np.ndarray,
                  grid: SpatialGrid) -> np.ndarray:
    """Zero samples whose interpolation argument left the fundamental box.

    Band-limited resampling is periodic; arguments outside [x_min, x_max)
    would alias to in-box values. The fields this module rescales are
    localized, so the true value there is below the leak tolerance anyway.
    """
    outside = (targets < grid.x_min) | (targets >= grid.x_max)
    if outside.any():
        values = values.copy()
        values[..., outside] = 0.0
    return values


def lens_forward(u: np.ndarray, t: float, osc: OscillatorPair,
                 grid: SpatialGrid):
    """Map u at oscillator time t to the lens field v at s = mu/nu.

    v(s, z) = nu^(1/2) u(nu z) e^{-i (nu'/nu) (nu z)^2 / 2}, sampled on the
    same grid; returns (s, v).
    """
    nu = float(osc.nu_of(t))
    if nu < 1e-3:
        raise HorizonError(f"nu({t}) = {nu:.3e}; lens transform singular")
    nu_dot = float(osc.nu_dot_of(t))
    s = float(osc.s_of(t))
    targets = nu * grid.points
    vals = resample_uniform(u, grid, nu * grid.x_min, nu * grid.dx, grid.n)
    vals = _mask_outside(vals, targets, grid)
    v = math.sqrt(nu) * vals * np.exp(-0.5j * (nu_dot / nu) * targets ** 2)
    return s, v


def lens_inverse(v: np.ndarray, s: float, osc: OscillatorPair,
                 grid: SpatialGrid, tau: float | None = None):
    """Inverse lens map: field u at the oscillator time tau with mu/nu = s.

    u(x) = nu^(-1/2) v(x / nu) e^{+i (nu'/nu) x^2 / 2}; returns (tau, u).
    Passing tau explicitly skips the interpolated inversion of mu/nu (used by
    the profile solver, which knows its snapshot times exactly).
    """
    if tau is None:
        tau = float(osc.tau_of_s(s))
    nu = float(osc.nu_of(tau))
    if nu < 1e-3:
        raise HorizonError(f"nu({tau}) = {nu:.3e}; lens transform singular")
    nu_dot = float(osc.nu_dot_of(tau))
    targets = grid.points / nu
    vals = resample_uniform(v, grid, grid.x_min / nu, grid.dx / nu, grid.n)
    vals = _mask_outside(vals, targets, grid)
    u = vals / math.sqrt(nu) * np.exp(0.5j * (nu_dot / nu) * grid.points ** 2)
    return tau, u


def write_path_csv(path: ClassicalPath, file_path, comment: str = "") -> None:
    """Export samples as CSV columns (t, x, xi, S)."""
    from .tableio import write_csv
    rows = np.column_stack([path.t, path.x, path.xi, path.S])
    write_csv(file_path, ("t", "x", "xi", "S"), rows, comment=comment)
