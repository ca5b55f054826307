"""Travelling-wave (y-independent) solutions of Delta u = 4 e^{-2u} - 4 e^u.

The 1D reduction u'' = 4 e^{-2u} - 4 e^u is a conservative oscillator with
potential V(u) = 4 e^u + 2 e^{-2u} and energy E = u'^2 / 2 + V(u).  V has its
unique minimum V(0) = 6, so closed orbits exist exactly for E > 6, with the
small-oscillation limit T -> 2 pi / sqrt(V''(0)) = 2 pi / sqrt(12).

In w = e^u the turning condition V(u) = E becomes the cubic
w^3 - (E/4) w^2 + 1/2 = 0, whose three real roots w_neg < 0 < w_lo <= w_hi
factor the energy gap as E - V = 4 (w_hi - w)(w - w_lo)(w - w_neg)/w^2.
Substituting w = w_mid + w_amp sin(phi) turns the turning-point period
integral into the cancellation-free, analytic form

    T(E) = 2^{-1/2} * integral_{-pi/2}^{pi/2} dphi / sqrt(w(phi) - w_neg),

evaluated here by Gauss-Legendre quadrature.  An independent shooting route
(high-order ODE integration with event detection) provides the cross-check.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IncommensuratePeriodError, NumericalFailure
from .grid import ScalarFieldPeriodic

V_MIN = 6.0


def potential(u):
    return 4.0 * np.exp(u) + 2.0 * np.exp(-2.0 * u)


def _cubic_roots(energy):
    """Roots w_neg < 0 < w_lo <= w_hi of w^3 - (E/4) w^2 + 1/2."""
    if energy <= V_MIN:
        raise ValueError(f"need energy > {V_MIN}, got {energy}")
    roots = np.roots([1.0, -energy / 4.0, 0.0, 0.5])
    if np.abs(roots.imag).max() > 1e-9:
        raise NumericalFailure(f"turning-point cubic lost realness at E={energy}")
    roots = np.sort(roots.real)
    return roots[0], roots[1], roots[2]


def turning_points(energy):
    """u_lo < 0 < u_hi with V(u) = E."""
    _, w_lo, w_hi = _cubic_roots(energy)
    return float(np.log(w_lo)), float(np.log(w_hi))


def period_quadrature(energy, nodes=128):
    w_neg, w_lo, w_hi = _cubic_roots(energy)
    mid, amp = 0.5 * (w_hi + w_lo), 0.5 * (w_hi - w_lo)
    t, wts = np.polynomial.legendre.leggauss(nodes)
    phi = 0.5 * np.pi * t
    w = mid + amp * np.sin(phi)
    integrand = 1.0 / np.sqrt(w - w_neg)
    return float(0.5 * np.pi * np.dot(wts, integrand) / np.sqrt(2.0))


def _rhs(_t, state):
    u, v = state
    return (v, 4.0 * np.exp(-2.0 * u) - 4.0 * np.exp(u))


def _shoot(energy, rtol=1e-12, atol=1e-14):
    """Integrate one orbit starting from the upper turning point.

    The orbit runs u_hi -> u_lo -> u_hi; by time-reversal symmetry the first
    upward crossing of u' = 0 happens exactly at half a period.
    """
    _, u_hi = turning_points(energy)
    t_guess = period_quadrature(energy)

    def turning(_t, state):
        return state[1]

    turning.direction = 1.0
    sol = solve_ivp(
        _rhs,
        (0.0, 1.5 * t_guess),
        [u_hi, 0.0],
        method="DOP853",
        rtol=rtol,
        atol=atol,
        dense_output=True,
        events=turning,
    )
    if not sol.success or len(sol.t_events[0]) == 0:
        raise NumericalFailure(f"shooting failed at E={energy}: {sol.message}")
    return 2.0 * float(sol.t_events[0][0]), sol.sol


def period_shooting(energy, rtol=1e-12, atol=1e-14):
    return _shoot(energy, rtol, atol)[0]


@dataclass
class WaveProfile1D:
    """One period of a travelling wave, sampled uniformly from the maximum."""

    period: float
    energy: float
    x: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)
    dense: object = field(default=None, repr=False)

    def __call__(self, x):
        """Evaluate u at arbitrary positions (periodically wrapped)."""
        xm = np.mod(np.asarray(x, dtype=float), self.period)
        if self.dense is not None:
            return np.atleast_2d(self.dense(np.atleast_1d(xm)))[0].reshape(np.shape(xm))
        # trigonometric evaluation of the stored samples
        n = len(self.u)
        coeff = np.fft.rfft(self.u) / n
        k = np.arange(len(coeff))
        phase = np.exp(2j * np.pi * np.outer(np.ravel(xm) / self.period, k))
        vals = (phase[:, 0] * coeff[0]).real + 2.0 * (phase[:, 1:] @ coeff[1:]).real
        if n % 2 == 0:
            vals -= (phase[:, -1] * coeff[-1]).real
        return vals.reshape(np.shape(xm))


def energy_drift(profile, samples=1024):
    """Max |E(x) - E| along the orbit; requires the dense solution."""
    if profile.dense is None:
        raise ValueError("profile has no dense solution attached")
    t = np.linspace(0.0, profile.period, samples)
    u, v = profile.dense(t)
    e = 0.5 * v**2 + potential(u)
    return float(np.abs(e - profile.energy).max())


def travelling_wave(energy, samples=512, drift_tol=1e-10):
    """One period of the y-independent solution with energy E > 6.

    The profile starts at the maximum, so it is even about x = 0; the period
    comes from shooting and is cross-checkable against period_quadrature.
    """
    period, dense = _shoot(energy)
    x = np.arange(samples) * (period / samples)
    u = dense(x)[0]
    profile = WaveProfile1D(period=period, energy=float(energy), x=x, u=u, dense=dense)
    drift = energy_drift(profile)
    if drift > drift_tol:
        raise NumericalFailure(f"energy drift {drift:.3e} exceeds {drift_tol:.1e}")
    return profile


def lift_1d(profile, grid, rel_tol=1e-6):
    """Lift a 1D profile to a y-independent periodic field; grid.lx must be an
    integer multiple of the wave period within rel_tol."""
    ratio = grid.lx / profile.period
    k = round(ratio)
    if k < 1 or abs(ratio - k) > rel_tol * max(1.0, ratio):
        raise IncommensuratePeriodError(
            f"lx = {grid.lx:.12g} is not an integer multiple of the wave period "
            f"{profile.period:.12g} (ratio {ratio:.9g})"
        )
    row = profile(grid.x)
    return ScalarFieldPeriodic(grid, np.tile(row, (grid.ny, 1)))
