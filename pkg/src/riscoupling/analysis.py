"""Asymptotic array-gain theory for vanishing element spacing.

The zero-spacing limit of the coupled transmit array gain
a(alpha)^H C^(-1) a(alpha) is the reciprocal Christoffel function
evaluated at cos(alpha).  Its global minimum (N/2 at worst) turns the
fully-connected lower bound (N^2/4) f(cos alpha) into a cubic law, and
the end-fire value f(+-1) = N^2 into a quartic one.  This module also
evaluates the finite-spacing array gains of both architectures through a
shared eigendecomposition of the (possibly loss-loaded) coupling matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coupling import (
    EIG_FLOOR,
    build_coupling_matrix,
    coupling_real_part,
    inv_sqrt_spd,
    steering_vector,
)
from .kernels import (
    christoffel_function,
    christoffel_forms,
    christoffel_lower_bound,
    legendre_value_and_derivative,
    stationarity_factor,
)

__all__ = [
    "LegendreEval",
    "MinimumReport",
    "TheoremBounds",
    "legendre",
    "christoffel_function",
    "christoffel_forms",
    "christoffel_lower_bound",
    "christoffel_minimum",
    "stationarity_factor",
    "coupled_gain_limit",
    "array_gain_diagonal",
    "array_gain_bd",
    "theorem_bounds",
]

#: Grid sizes for the minimum certificate and its bracketing scan.
CERTIFICATE_GRID = 20001
BRACKET_GRID = 2001
ROOT_TOL = 1e-12


@dataclass(frozen=True)
class LegendreEval:
    """Value and derivative of one Legendre polynomial at one point."""

    degree: int
    x: float
    value: float
    derivative: float


def legendre(n: int, x: float) -> LegendreEval:
    """Evaluate P_n and P'_n at a scalar x in [-1, 1]."""
    value, derivative = legendre_value_and_derivative(n, float(x))
    return LegendreEval(int(n), float(x), value, derivative)


@dataclass(frozen=True)
class MinimumReport:
    """Certified global minimum of the reciprocal Christoffel function."""

    n: int
    x_min: float
    f_min: float
    parity: str
    x0: float
    certificate_margin: float
    grid_points: int


def _second_derivative(n: int, x: float) -> float:
    # Legendre ODE: (1 - x^2) P'' = 2x P' - n(n+1) P
    p, dp = legendre_value_and_derivative(n, x)
    return (2.0 * x * dp - n * (n + 1.0) * p) / (1.0 - x * x)


def _derivative_root_near_zero(n: int) -> float:
    """Smallest positive zero of P'_n (odd n >= 3).

    Sign-change bracket on a dense grid, bisection, then Newton polish
    using the ODE form of P''_n; tolerance ROOT_TOL in x.
    """
    grid = np.linspace(0.0, 1.0, BRACKET_GRID)
    _, dp = legendre_value_and_derivative(n, grid[:-1])  # exclude x=1 endpoint spike
    sign_change = np.nonzero(np.sign(dp[:-1]) * np.sign(dp[1:]) < 0)[0]
    if sign_change.size == 0:
        raise FloatingPointError(f"no bracket for the derivative zero at n={n}")
    lo = float(grid[sign_change[0]])
    hi = float(grid[sign_change[0] + 1])
    f_lo = legendre_value_and_derivative(n, lo)[1]
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        f_mid = legendre_value_and_derivative(n, mid)[1]
        if f_lo * f_mid <= 0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
        if hi - lo < 1e-13:
            break
    x0 = 0.5 * (lo + hi)
    for _ in range(8):
        dp = legendre_value_and_derivative(n, x0)[1]
        step = dp / _second_derivative(n, x0)
        x0_new = min(max(x0 - step, lo - 1e-12), hi + 1e-12)
        if abs(x0_new - x0) < ROOT_TOL:
            x0 = x0_new
            break
        x0 = x0_new
    return x0


def christoffel_minimum(n: int, grid_points: int = CERTIFICATE_GRID) -> MinimumReport:
    """Global minimum of the reciprocal Christoffel function on [-1, 1].

    Even n: minimum at x = 0 with value n^2 P_n(0)^2.  Odd n >= 3: minima
    at +-x0 with x0 the positive zero of P'_n closest to 0, value
    n^2 P_n(x0)^2.  n = 1 is degenerate (the function is identically 1);
    x_min and x0 are reported as 0 by convention.

    A dense-grid scan certifies the claim: ``certificate_margin`` is
    min(f on grid) - f_min and a margin below -1e-9 raises.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    n = int(n)
    if n == 1:
        x_min, x0, parity = 0.0, 0.0, "odd"
        f_min = 1.0
    elif n % 2 == 0:
        p0 = legendre_value_and_derivative(n, 0.0)[0]
        x_min, x0, parity = 0.0, 0.0, "even"
        f_min = n * n * p0 * p0
    else:
        x0 = _derivative_root_near_zero(n)
        p_x0 = legendre_value_and_derivative(n, x0)[0]
        x_min, parity = x0, "odd"
        f_min = n * n * p_x0 * p_x0
    grid = np.linspace(-1.0, 1.0, grid_points)
    margin = float(christoffel_function(n, grid).min() - f_min)
    if margin < -1e-9:
        raise FloatingPointError(
            f"certified minimum violated at n={n}: margin {margin:.3e}"
        )
    return MinimumReport(
        n=n,
        x_min=x_min,
        f_min=float(f_min),
        parity=parity,
        x0=float(x0),
        certificate_margin=margin,
        grid_points=grid_points,
    )


def coupled_gain_limit(n: int, alpha: float) -> float:
    """Zero-spacing limit of a(alpha)^H C^(-1) a(alpha)."""
    return float(christoffel_function(n, float(np.cos(alpha))))


def _gain_terms(
    n: int, d: float, alpha_tx: float, alpha_rx: float, loss_ratio: float, eig_floor: float
):
    c = coupling_real_part(build_coupling_matrix(n, d), loss_ratio)
    w = inv_sqrt_spd(c, eig_floor)
    u = w @ steering_vector(n, d, alpha_rx).entries
    v = w @ steering_vector(n, d, alpha_tx).entries
    t1 = abs(u @ v)
    return t1, np.abs(u), np.abs(v)


def array_gain_diagonal(
    n: int,
    d: float,
    alpha_tx: float,
    alpha_rx: float,
    loss_ratio: float = 0.0,
    eig_floor: float = EIG_FLOOR,
) -> float:
    """Decoupled diagonal array gain at finite spacing.

    (1/4) (|a_DR^T C^(-1) a_RS| + sum_n |(C^(-1/2) a_DR)_n (C^(-1/2) a_RS)_n|)^2
    with C the coupling matrix loss-loaded by ``loss_ratio``.
    """
    t1, nu, nv = _gain_terms(n, d, alpha_tx, alpha_rx, loss_ratio, eig_floor)
    return float(0.25 * (t1 + np.sum(nu * nv)) ** 2)


def array_gain_bd(
    n: int,
    d: float,
    alpha_tx: float,
    alpha_rx: float,
    loss_ratio: float = 0.0,
    eig_floor: float = EIG_FLOOR,
) -> float:
    """Fully-connected array gain at finite spacing.

    (1/4) (|a_DR^T C^(-1) a_RS| + sqrt(a_DR^H C^(-1) a_DR a_RS^H C^(-1) a_RS))^2,
    evaluated through the same eigendecomposition as the diagonal gain so
    the specular-geometry tie between the two is exact in floating point.
    """
    t1, nu, nv = _gain_terms(n, d, alpha_tx, alpha_rx, loss_ratio, eig_floor)
    t2 = np.sqrt(np.sum(nu * nu) * np.sum(nv * nv))
    return float(0.25 * (t1 + t2) ** 2)


@dataclass(frozen=True)
class TheoremBounds:
    """Zero-spacing gain bounds for one element count.

    ``end_fire_limit`` is the limiting transmit gain at alpha = pi (equal
    to n^2), whose square ``quartic_gain`` is the maximum achievable array
    gain; ``bd_bound_at_angle`` is the fully-connected lower bound
    (n^2/4) f(cos alpha_rx) with floor ``cubic_floor`` = n^3/8.  Grid
    extrema over [0, pi] certify both directions.
    """

    n: int
    alpha_rx: float
    end_fire_limit: float
    quartic_gain: float
    quartic_ceiling: float
    bd_bound_at_angle: float
    cubic_floor: float
    grid_bound_min: float
    grid_limit_max: float
    n_angles: int

    @property
    def cubic_holds(self) -> bool:
        return self.grid_bound_min >= self.cubic_floor - 1e-9

    @property
    def quartic_holds(self) -> bool:
        return (
            self.quartic_gain == self.quartic_ceiling
            and self.grid_limit_max <= self.quartic_ceiling * (1.0 + 1e-12)
        )


def theorem_bounds(n: int, alpha_rx: float = np.pi, n_angles: int = 181) -> TheoremBounds:
    """Evaluate the quartic end-fire and cubic any-angle gain bounds."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    n = int(n)
    end_fire = coupled_gain_limit(n, np.pi)
    angles = np.linspace(0.0, np.pi, n_angles)
    f_grid = christoffel_function(n, np.cos(angles))
    bd_bound = 0.25 * n * n * f_grid
    return TheoremBounds(
        n=n,
        alpha_rx=float(alpha_rx),
        end_fire_limit=end_fire,
        quartic_gain=end_fire * end_fire,
        quartic_ceiling=float(n**4),
        bd_bound_at_angle=float(0.25 * n * n * christoffel_function(n, float(np.cos(alpha_rx)))),
        cubic_floor=n**3 / 8.0,
        grid_bound_min=float(bd_bound.min()),
        grid_limit_max=float((f_grid * f_grid).max()),
        n_angles=n_angles,
    )
