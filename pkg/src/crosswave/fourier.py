"""Uniform periodic grids and band-limited spectral operations.

Everything here treats sampled data as a trigonometric polynomial on
[x_min, x_max): derivatives, norms and resampling are exact for fields whose
spectrum has decayed below roundoff before the Nyquist mode, which the solvers
enforce separately through their boundary/tail guards.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np
from scipy.signal import czt

from .errors import ConfigError


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform grid x_j = x_min + j*dx, j = 0..n-1, with dx = (x_max - x_min)/n.

    The right endpoint is excluded (periodic convention), so FFTs of sampled
    data use the standard wavenumbers 2*pi*fftfreq(n, dx).
    """

    n: int
    x_min: float
    x_max: float

    def __post_init__(self):
        if self.n < 16 or (self.n & (self.n - 1)) != 0:
            raise ConfigError(f"grid size must be a power of two >= 16, got {self.n}")
        if not self.x_max > self.x_min:
            raise ConfigError(f"empty grid interval [{self.x_min}, {self.x_max})")

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def points(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    @property
    def wavenumbers(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    def norm_l2(self, values: np.ndarray) -> float:
        """Discrete L2 norm sqrt(dx * sum |v|^2), summed over all axes."""
        return float(np.sqrt(self.dx * np.sum(np.abs(values) ** 2)))

    def mass(self, values: np.ndarray) -> float:
        return float(self.dx * np.sum(np.abs(values) ** 2))


def spectral_derivative(values: np.ndarray, grid: SpatialGrid, order: int = 1) -> np.ndarray:
    """d^order/dx^order of the trigonometric interpolant, sampled on the grid.

    Acts along the last axis. For odd orders the (real-asymmetric) Nyquist
    mode is dropped, the usual convention for even n.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    k = grid.wavenumbers
    mult = (1j * k) ** order
    if order % 2 == 1:
        mult[grid.n // 2] = 0.0
    return np.fft.ifft(np.fft.fft(values, axis=-1) * mult, axis=-1)


def resample_uniform(values: np.ndarray, grid: SpatialGrid, x0: float,
                     spacing: float, m: int) -> np.ndarray:
    """Evaluate the band-limited interpolant at x0 + j*spacing, j = 0..m-1.

    Uses a chirp-z transform over the shifted (monotone) frequency index, so
    the cost is FFT-like for any m and any real spacing. Targets are taken
    modulo the period: callers that map between differently scaled boxes must
    mask arguments that fall outside [x_min, x_max) themselves.

    Works on stacked fields with shape (..., n).
    """
    n = grid.n
    length = grid.length
    # fftshift puts mode q' = q + n/2 at storage slot q', making the physical
    # frequency affine in the index: k(q') = 2*pi*(q' - n/2)/L.
    coeffs = np.fft.fftshift(np.fft.fft(values, axis=-1), axes=-1) / n
    base = 2.0 * np.pi * (x0 - grid.x_min) / length
    step = 2.0 * np.pi * spacing / length
    a = np.exp(-1j * base)          # czt multiplies by a^(-q')
    w = np.exp(1j * step)           # and by w^(j*q')
    out = czt(coeffs, m=m, w=w, a=a)
    # undo the index shift: each target also carries e^{-i (n/2) k_unit (x - x_min)}
    j = np.arange(m)
    out = out * np.exp(-0.5j * n * (base + step * j))
    return out


def spectral_tail_fraction(values: np.ndarray, top_fraction: float = 0.125) -> float:
    """Max spectral magnitude in the highest `top_fraction` of |k|, over the peak.

    A value near roundoff means the sampled field is resolved; anything much
    larger signals aliasing.
    """
    spec = np.abs(np.fft.fft(values, axis=-1))
    peak = spec.max()
    if peak == 0.0:
        return 0.0
    n = values.shape[-1]
    k_index = np.abs(np.fft.fftfreq(n, d=1.0)) * n  # 0..n/2
    tail = k_index >= (1.0 - top_fraction) * (n // 2)
    return float(spec[..., tail].max() / peak)
