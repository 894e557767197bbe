"""Physical parameters, derived scales, numerics configuration, validation.

All quantities are dimensionless. The two derived scales carried by
SemiclassicalParams are

    t_eps = c0 * epsilon^(1/2 - gamma)   (outer/inner switch time)
    s_eps = c0 * epsilon^(-gamma)        (inner horizon in rescaled time)

so that t_eps = sqrt(epsilon) * s_eps holds exactly in floating point only up
to rounding; the stored fields are each computed from the primitives, never
from one another.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigError


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite, got {value!r}")
    return value


def _require_positive(name: str, value: float) -> float:
    value = _require_finite(name, value)
    if value <= 0.0:
        raise ConfigError(f"{name} must be > 0, got {value}")
    return value


@dataclass(frozen=True)
class SemiclassicalParams:
    """Scalar parameters of one semiclassical crossing problem.

    delta, t_eps and s_eps are derived; use derive_scales() to construct so
    they are always consistent with the primitives.
    """

    epsilon: float
    c: float
    kappa: float
    xi0: float
    T: float
    gamma: float
    c0: float
    delta: float
    t_eps: float
    s_eps: float

    def __post_init__(self):
        _require_positive("epsilon", self.epsilon)
        _require_positive("c", self.c)
        _require_positive("xi0", self.xi0)
        _require_positive("T", self.T)
        _require_positive("c0", self.c0)
        _require_finite("kappa", self.kappa)
        if not (0.0 < self.gamma < 1.0 / 6.0):
            raise ConfigError(
                f"gamma out of open range ]0, 1/6[: got {self.gamma}")
        if abs(self.kappa) > 1.0:
            raise ConfigError(f"|kappa| must be <= 1, got {self.kappa}")
        derived = _derived(self.epsilon, self.c, self.gamma, self.c0)
        for name in ("delta", "t_eps", "s_eps"):
            if getattr(self, name) != derived[name]:
                raise ConfigError(f"{name} inconsistent with primitives")

    def with_epsilon(self, epsilon: float) -> "SemiclassicalParams":
        """Same physics at a different epsilon (used by convergence sweeps)."""
        return derive_scales(epsilon, self.c, self.kappa, self.xi0,
                             self.T, self.gamma, self.c0)


def _derived(epsilon: float, c: float, gamma: float, c0: float) -> dict:
    return {
        "delta": c * math.sqrt(epsilon),
        "t_eps": c0 * epsilon ** (0.5 - gamma),
        "s_eps": c0 * epsilon ** (-gamma),
    }


def derive_scales(epsilon: float, c: float, kappa: float, xi0: float,
                  T: float, gamma: float, c0: float) -> SemiclassicalParams:
    """Validate primitives and populate the derived fields delta, t_eps, s_eps."""
    epsilon = _require_positive("epsilon", epsilon)
    c = _require_positive("c", c)
    xi0 = _require_positive("xi0", xi0)
    T = _require_positive("T", T)
    c0 = _require_positive("c0", c0)
    kappa = _require_finite("kappa", kappa)
    gamma = _require_finite("gamma", gamma)
    d = _derived(epsilon, c, gamma, c0)
    return SemiclassicalParams(epsilon=epsilon, c=c, kappa=kappa, xi0=xi0,
                               T=T, gamma=gamma, c0=c0, **d)


@dataclass(frozen=True)
class Tolerances:
    """Named tolerances used by the runtime guards and the CLI pass/fail rules."""

    mass_drift: float = 1e-8          # relative L2-mass drift per unit time
    energy_drift: float = 1e-6        # relative classical-energy drift (reject)
    wronskian: float = 1e-8           # oscillator Wronskian deviation from 1
    norm_drift: float = 1e-10         # pointwise two-level norm drift per unit s
    boundary_leak: float = 1e-6       # edge amplitude relative to peak
    mass_closure: float = 1e-6        # |m_plus + m_minus - total| / total
    transition_rel: float = 0.10      # relative error band for p_measured
    transition_abs: float = 1e-2      # absolute floor for near-zero p_theory
    scattering_abs: float = 1e-3      # finite-horizon LZ coefficient tolerance


@dataclass(frozen=True)
class NumericsConfig:
    n_points: int = 4096
    x_min: float = -4.0
    x_max: float = 4.0
    dt: float = 1e-4
    ode_dt: float = 1e-4
    lz_horizon: float = 200.0
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        n = self.n_points
        if n < 16 or (n & (n - 1)) != 0:
            raise ConfigError(f"n_points must be a power of two >= 16, got {n}")
        if not self.x_min < self.x_max:
            raise ConfigError(f"x_min must be < x_max, got [{self.x_min}, {self.x_max}]")
        _require_positive("dt", self.dt)
        _require_positive("ode_dt", self.ode_dt)
        _require_positive("lz_horizon", self.lz_horizon)

    @property
    def domain(self) -> tuple:
        return (self.x_min, self.x_max)


@dataclass(frozen=True)
class ResolutionCheck:
    name: str
    passed: bool
    measured: float     # points per wavelength / per packet width
    required: float


@dataclass(frozen=True)
class ResolutionReport:
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed_names(self) -> list:
        return [c.name for c in self.checks if not c.passed]


def resolution_check(params: SemiclassicalParams, num: NumericsConfig) -> ResolutionReport:
    """Can this grid see the solution?

    Two scales must be resolved: the carrier oscillation, wavelength
    2*pi*epsilon/xi0 (needs >= 8 points), and the packet width sqrt(epsilon)
    (needs >= 32 points). Advisory only; callers decide whether to abort.
    """
    dx = (num.x_max - num.x_min) / num.n_points
    wavelength = 2.0 * math.pi * params.epsilon / params.xi0
    width = math.sqrt(params.epsilon)
    checks = (
        ResolutionCheck("oscillation", wavelength / dx >= 8.0, wavelength / dx, 8.0),
        ResolutionCheck("packet_width", width / dx >= 32.0, width / dx, 32.0),
    )
    return ResolutionReport(checks=checks)


# flat key=value config files ------------------------------------------------

_PARAM_KEYS = ("epsilon", "c", "kappa", "xi0", "T", "gamma", "c0")
_NUM_KEYS = ("n_points", "x_min", "x_max", "dt", "ode_dt", "lz_horizon")
_REQUIRED = ("epsilon", "c", "xi0")
_DEFAULTS = {
    "kappa": 0.0, "T": 0.5, "gamma": 0.1, "c0": 1.0,
    "n_points": 4096, "x_min": -4.0, "x_max": 4.0,
    "dt": 1e-4, "ode_dt": 1e-4, "lz_horizon": 200.0,
}


def parse_config_text(text: str, overrides: dict | None = None):
    """Parse `key = value` lines into (SemiclassicalParams, NumericsConfig).

    Blank lines and lines starting with '#' are ignored. Unknown keys are
    errors. `overrides` (e.g. from environment variables) are applied after
    the file and are validated against the same key set.
    """
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _PARAM_KEYS and key not in _NUM_KEYS:
            raise ConfigError(f"unknown key: {key}")
        if key in values:
            raise ConfigError(f"duplicate key: {key}")
        values[key] = val
    for key, val in (overrides or {}).items():
        if key not in _PARAM_KEYS and key not in _NUM_KEYS:
            raise ConfigError(f"unknown key: {key}")
        values[key] = val

    for key in _REQUIRED:
        if key not in values:
            raise ConfigError(f"missing key: {key}")
    merged = dict(_DEFAULTS)
    merged.update(values)

    def as_float(key):
        try:
            return float(merged[key])
        except (TypeError, ValueError):
            raise ConfigError(f"key {key}: not a number: {merged[key]!r}") from None

    def as_int(key):
        v = as_float(key)
        if v != int(v):
            raise ConfigError(f"key {key}: expected integer, got {merged[key]!r}")
        return int(v)

    params = derive_scales(epsilon=as_float("epsilon"), c=as_float("c"),
                           kappa=as_float("kappa"), xi0=as_float("xi0"),
                           T=as_float("T"), gamma=as_float("gamma"),
                           c0=as_float("c0"))
    num = NumericsConfig(n_points=as_int("n_points"), x_min=as_float("x_min"),
                         x_max=as_float("x_max"), dt=as_float("dt"),
                         ode_dt=as_float("ode_dt"),
                         lz_horizon=as_float("lz_horizon"))
    return params, num


def load_config(path, overrides: dict | None = None):
    """Read a UTF-8 key=value file from `path`; see parse_config_text."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, overrides)
