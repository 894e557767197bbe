import numpy as np
import pytest

from crosswave.errors import ConfigError
from crosswave.fourier import (SpatialGrid, resample_uniform,
                               spectral_derivative, spectral_tail_fraction)


def test_grid_basics():
    g = SpatialGrid(64, -2.0, 2.0)
    assert g.dx == pytest.approx(4 / 64)
    assert g.points[0] == -2.0 and g.points[-1] == pytest.approx(2.0 - g.dx)
    assert g.wavenumbers[1] == pytest.approx(2 * np.pi / 4)
    with pytest.raises(ConfigError):
        SpatialGrid(63, -2.0, 2.0)
    with pytest.raises(ConfigError):
        SpatialGrid(8, -2.0, 2.0)
    with pytest.raises(ConfigError):
        SpatialGrid(64, 2.0, -2.0)


def test_norm_and_mass_quadrature():
    g = SpatialGrid(256, 0.0, 2 * np.pi)
    v = np.sin(3 * g.points)
    # integral of sin^2 over a full period is pi
    assert g.mass(v) == pytest.approx(np.pi, rel=1e-14)
    assert g.norm_l2(v) == pytest.approx(np.sqrt(np.pi), rel=1e-14)


def test_spectral_derivative_trig():
    g = SpatialGrid(128, 0.0, 2 * np.pi)
    v = np.sin(5 * g.points)
    d1 = spectral_derivative(v, g, 1)
    assert np.abs(d1.real - 5 * np.cos(5 * g.points)).max() < 1e-11
    d2 = spectral_derivative(v, g, 2)
    assert np.abs(d2.real + 25 * v).max() < 1e-10
    with pytest.raises(ValueError):
        spectral_derivative(v, g, 0)


def test_spectral_derivative_gaussian():
    g = SpatialGrid(512, -12.0, 12.0)
    x = g.points
    v = np.exp(-x ** 2 / 2)
    d1 = spectral_derivative(v, g)
    assert np.abs(d1.real + x * v).max() < 1e-12


def test_resample_identity_and_shift():
    g = SpatialGrid(256, -10.0, 10.0)
    x = g.points
    u = np.exp(-x ** 2) * np.exp(0.7j * x)
    # own points: identity
    back = resample_uniform(u, g, g.x_min, g.dx, g.n)
    assert np.abs(back - u).max() < 1e-12
    # shifted by half a cell: compare against the analytic field
    x0 = g.x_min + 0.5 * g.dx
    shifted = resample_uniform(u, g, x0, g.dx, g.n)
    xs = x0 + g.dx * np.arange(g.n)
    exact = np.exp(-xs ** 2) * np.exp(0.7j * xs)
    assert np.abs(shifted - exact).max() < 1e-12


def test_resample_matches_direct_dft_sum():
    # brute-force trigonometric interpolation as the oracle
    rng = np.random.default_rng(7)
    g = SpatialGrid(32, -1.0, 3.0)
    u = rng.normal(size=32) + 1j * rng.normal(size=32)
    x0, spacing, m = -0.37, 0.11, 17
    got = resample_uniform(u, g, x0, spacing, m)
    coeffs = np.fft.fft(u) / g.n
    k = g.wavenumbers
    targets = x0 + spacing * np.arange(m)
    ref = np.array([(coeffs * np.exp(1j * k * (t - g.x_min))).sum() for t in targets])
    assert np.abs(got - ref).max() < 1e-12


def test_resample_scaled_spacing_and_stacking():
    # evaluating on a finer lattice with a stacked (2, n) field
    g = SpatialGrid(128, -8.0, 8.0)
    x = g.points
    u = np.stack([np.exp(-x ** 2), x * np.exp(-x ** 2 / 2)]).astype(complex)
    x0, spacing, m = -2.0, g.dx / 3, 96
    got = resample_uniform(u, g, x0, spacing, m)
    xs = x0 + spacing * np.arange(m)
    exact = np.stack([np.exp(-xs ** 2), xs * np.exp(-xs ** 2 / 2)])
    assert np.abs(got - exact).max() < 1e-11


def test_spectral_tail_fraction():
    g = SpatialGrid(256, -16.0, 16.0)
    smooth = np.exp(-g.points ** 2 / 2)
    assert spectral_tail_fraction(smooth) < 1e-14
    ragged = np.sign(np.sin(3 * g.points))   # discontinuous: fat tail
    assert spectral_tail_fraction(ragged) > 1e-3
    assert spectral_tail_fraction(np.zeros(256)) == 0.0
