"""The 2x2 avoided-crossing potential and everything spectral about it.

V(x) = [[x, delta], [delta, -x]] has eigenvalues +-r with r = sqrt(x^2+delta^2)
and a minimal gap 2*delta at x = 0. All functions are vectorized over x.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np


def _radius(x, delta):
    return np.hypot(x, delta)


def eval_potential(x, delta: float) -> np.ndarray:
    """[[x, delta], [delta, -x]]; shape (..., 2, 2) for array x."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape + (2, 2))
    out[..., 0, 0] = x
    out[..., 0, 1] = delta
    out[..., 1, 0] = delta
    out[..., 1, 1] = -x
    return out


@dataclass(frozen=True)
class EigenPair:
    """Eigenvalues and real orthonormal eigenvectors of V(x).

    chi_plus, chi_minus have shape (2,) + x.shape, component index first.
    """

    lambda_plus: np.ndarray
    lambda_minus: np.ndarray
    chi_plus: np.ndarray
    chi_minus: np.ndarray


def eigenpair(x, delta: float) -> EigenPair:
    """Eigenpairs in the half-angle form.

    With theta = atan2(delta, x) in (0, pi) for delta > 0,

        chi_plus  = ( cos(theta/2),  sin(theta/2))
        chi_minus = ( sin(theta/2), -cos(theta/2))

    which is smooth in x and avoids the cancellation of the radical quotient
    for x >> delta. At x = 0 both components are 1/sqrt(2); as x -> +inf
    chi_plus -> (1, 0); as x -> -inf chi_plus -> (0, 1), the vector the
    matching step pins the lower mode to.
    """
    x = np.asarray(x, dtype=float)
    r = _radius(x, delta)
    half = 0.5 * np.arctan2(delta, x)
    c, s = np.cos(half), np.sin(half)
    return EigenPair(lambda_plus=r, lambda_minus=-r,
                     chi_plus=np.stack([c, s]),
                     chi_minus=np.stack([s, -c]))


def eigenpair_radical(x, delta: float) -> EigenPair:
    """Eigenvectors via the radical quotient (reference form, used in tests).

    Theta_1^+ = delta / N, Theta_2^+ = (r - x) / N with
    N = sqrt(2 r (r - x)). For x > 0 the difference r - x is computed as
    delta^2/(r + x), algebraically the same quantity without the cancellation
    that would otherwise swamp the tail values. Kept to check the half-angle
    form against.
    """
    x = np.asarray(x, dtype=float)
    r = _radius(x, delta)
    rmx = np.where(x > 0.0, delta * delta / (r + x), r - x)
    norm = np.sqrt(2.0 * r * rmx)
    t1 = delta / norm
    t2 = rmx / norm
    return EigenPair(lambda_plus=r, lambda_minus=-r,
                     chi_plus=np.stack([t1, t2]),
                     chi_minus=np.stack([t2, -t1]))


def lambda_second(x, delta: float):
    """Curvature of the upper eigenvalue: delta^2 (x^2+delta^2)^(-3/2).

    Peaks at 1/delta at the crossing; this is the harmonic coefficient of the
    profile equation.
    """
    r2 = np.square(np.asarray(x, dtype=float)) + delta * delta
    return delta * delta / (r2 * np.sqrt(r2))


def pointwise_propagator(x, delta: float, tau: float) -> np.ndarray:
    """exp(-i tau V(x)) in closed form; shape (..., 2, 2).

    V^2 = r^2 I, so exp(-i tau V) = cos(tau r) I - i sin(tau r)/r * V exactly.
    """
    x = np.asarray(x, dtype=float)
    r = _radius(x, delta)
    cos = np.cos(tau * r)
    slc = np.sin(tau * r) / r
    out = np.zeros(x.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = cos - 1j * slc * x
    out[..., 0, 1] = -1j * slc * delta
    out[..., 1, 0] = -1j * slc * delta
    out[..., 1, 1] = cos + 1j * slc * x
    return out


def apply_pointwise_propagator(values: np.ndarray, x: np.ndarray, delta: float,
                               tau: float) -> np.ndarray:
    """Apply exp(-i tau V(x_j)) to a (2, n) field without forming matrices."""
    r = _radius(x, delta)
    cos = np.cos(tau * r)
    slc = np.sin(tau * r) / r
    p1, p2 = values[0], values[1]
    return np.stack([cos * p1 - 1j * slc * (x * p1 + delta * p2),
                     cos * p2 - 1j * slc * (delta * p1 - x * p2)])


def project_mode_values(values: np.ndarray, x: np.ndarray, delta: float):
    """Coefficients (psi_plus, psi_minus) of a (2, n) field in the eigenbasis.

    The eigenvectors are real, so the Hermitian inner product is a plain
    componentwise combination.
    """
    pair = eigenpair(x, delta)
    psi_plus = pair.chi_plus[0] * values[0] + pair.chi_plus[1] * values[1]
    psi_minus = pair.chi_minus[0] * values[0] + pair.chi_minus[1] * values[1]
    return psi_plus, psi_minus


def project_modes(psi, delta: float):
    """Mode coefficients of a SpinorField: psi = psi_plus chi+ + psi_minus chi-."""
    return project_mode_values(psi.values, psi.grid.points, delta)


@dataclass(frozen=True)
class DerivativeBoundReport:
    order: int
    delta: float
    empirical_constant: float
    worst_x: float


def eigenvector_derivative_bound_check(delta: float, order: int) -> DerivativeBoundReport:
    """Measure sup |d^order chi/dx^order| / envelope over a log-spaced sweep.

    The envelopes are delta/(x^2+delta^2) for order 1 and
    delta/(x^2+delta^2)^(3/2) for order 2. Central finite differences with a
    per-point step h ~ scale(x) * 1e-5 keep the FD error far below the bound.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    mags = np.concatenate([[0.0], np.logspace(-3, 6, 400) * delta])
    xs = np.concatenate([-mags[::-1], mags[1:]])
    scale = np.maximum(np.abs(xs), delta)
    h = 1e-5 * scale

    def chi(x):
        return eigenpair(x, delta).chi_plus

    if order == 1:
        deriv = (chi(xs + h) - chi(xs - h)) / (2.0 * h)
        envelope = delta / (xs ** 2 + delta ** 2)
    else:
        deriv = (chi(xs + h) - 2.0 * chi(xs) + chi(xs - h)) / (h * h)
        envelope = delta / (xs ** 2 + delta ** 2) ** 1.5
    ratio = np.linalg.norm(deriv, axis=0) / envelope
    worst = int(np.argmax(ratio))
    return DerivativeBoundReport(order=order, delta=delta,
                                 empirical_constant=float(ratio[worst]),
                                 worst_x=float(xs[worst]))
