"""Physical array quantities for a uniform linear array of isotropic elements.

Builds the mutual-coupling impedance matrix, its ohmic-loss variant, the
dimensionless coupling matrix and its symmetric square roots, and LOS
steering vectors.  Spacings are dimensionless (in wavelengths), so the
phase argument between elements i and j is ``2*pi*d*|i-j|``.

All functions are pure; returned dataclasses are frozen and safe to share
between threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IllConditioned

#: Relative eigenvalue floor below which coupling matrices are rejected.
EIG_FLOOR = 1e-12


@dataclass(frozen=True)
class ImpedanceMatrix:
    """Reciprocal N-port impedance matrix (Ohms) at reference resistance R."""

    entries: np.ndarray
    ref_resistance: float = 1.0

    def __post_init__(self):
        z = np.atleast_2d(np.asarray(self.entries, dtype=complex))
        if z.shape[0] != z.shape[1]:
            raise ValueError(f"impedance matrix must be square, got {z.shape}")
        if not np.isfinite(z).all():
            raise ValueError("impedance matrix has non-finite entries")
        scale = max(1.0, float(np.abs(z).max()))
        if np.abs(z - z.T).max() > 1e-9 * scale:
            raise ValueError("impedance matrix must be symmetric (reciprocal)")
        if self.ref_resistance <= 0:
            raise ValueError("reference resistance must be positive")
        object.__setattr__(self, "entries", z)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class CouplingMatrix:
    """Dimensionless real coupling matrix Re(Z_R)/R, optionally loss-loaded."""

    entries: np.ndarray
    loss_ratio: float = 0.0

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.entries, dtype=float))
        if c.shape[0] != c.shape[1]:
            raise ValueError(f"coupling matrix must be square, got {c.shape}")
        if np.abs(c - c.T).max() > 1e-9 * max(1.0, float(np.abs(c).max())):
            raise ValueError("coupling matrix must be symmetric")
        if self.loss_ratio < 0:
            raise ValueError("loss ratio must be nonnegative")
        object.__setattr__(self, "entries", c)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class SteeringVector:
    """Unit-modulus LOS array response at angle ``angle`` (radians)."""

    entries: np.ndarray
    angle: float
    spacing: float


def build_coupling_matrix(n: int, d: float, r: float = 1.0) -> ImpedanceMatrix:
    """Mutual-coupling impedance matrix of an N-element ULA.

    Off-diagonal entries are ``-r * exp(-1j*phi) / (1j*phi)`` with
    ``phi = 2*pi*d*|i-j|``; equivalently the real part is
    ``r*sin(phi)/phi`` and the imaginary part ``r*cos(phi)/phi``.
    Diagonal entries equal the radiation resistance ``r``.

    Parameters
    ----------
    n : int
        Number of array elements (>= 1).
    d : float
        Element spacing in wavelengths (> 0; the formula is singular at 0).
    r : float
        Radiation/reference resistance in Ohms.
    """
    if n < 1:
        raise ValueError("element count must be >= 1")
    if d <= 0:
        raise ValueError("spacing must be positive (formula singular at d=0)")
    if r <= 0:
        raise ValueError("reference resistance must be positive")
    m = np.abs(np.subtract.outer(np.arange(n), np.arange(n))).astype(float)
    z = np.full((n, n), complex(r))
    off = m > 0
    phi = 2.0 * np.pi * d * m[off]
    z[off] = -r * np.exp(-1j * phi) / (1j * phi)
    # enforce exact reciprocity: entries depend on |i-j| only, but the
    # vectorized exp may not be bit-symmetric on exotic BLAS backends
    z = np.triu(z) + np.triu(z, 1).T
    return ImpedanceMatrix(z, r)


def with_ohmic_loss(z_r: ImpedanceMatrix, loss_ratio: float) -> ImpedanceMatrix:
    """Add the dissipation resistance ``loss_ratio * R`` to the diagonal."""
    if loss_ratio < 0:
        raise ValueError("loss ratio must be nonnegative")
    if loss_ratio == 0:
        return z_r
    z = z_r.entries + loss_ratio * z_r.ref_resistance * np.eye(z_r.n)
    return ImpedanceMatrix(z, z_r.ref_resistance)


def coupling_real_part(z_r: ImpedanceMatrix, loss_ratio: float = 0.0) -> CouplingMatrix:
    """Dimensionless coupling matrix ``Re(Z_R)/R + loss_ratio*I``."""
    if loss_ratio < 0:
        raise ValueError("loss ratio must be nonnegative")
    c = z_r.entries.real / z_r.ref_resistance
    if loss_ratio > 0:
        c = c + loss_ratio * np.eye(z_r.n)
    return CouplingMatrix(c, loss_ratio)


def steering_vector(n: int, d: float, angle: float) -> SteeringVector:
    """LOS ULA response; entry k is ``exp(-1j * k * 2*pi*d*cos(angle))``."""
    if n < 1:
        raise ValueError("element count must be >= 1")
    a = np.exp(-1j * np.arange(n) * (2.0 * np.pi * d * np.cos(angle)))
    return SteeringVector(a, float(angle), float(d))


def _as_matrix(c) -> np.ndarray:
    if isinstance(c, CouplingMatrix):
        return c.entries
    return np.atleast_2d(np.asarray(c, dtype=float))


def _gated_eigh(c: np.ndarray, eig_floor: float):
    w, v = np.linalg.eigh(c)
    if w[-1] <= 0:
        raise IllConditioned("coupling matrix is not positive definite")
    if w[0] < eig_floor * w[-1]:
        raise IllConditioned(
            f"eigenvalue ratio {w[0] / w[-1]:.3e} below floor {eig_floor:.1e}; "
            "retry with a nonzero loss ratio"
        )
    return w, v


def sqrt_spd(c, eig_floor: float = EIG_FLOOR) -> np.ndarray:
    """Principal square root of a symmetric positive-definite matrix.

    Raises
    ------
    IllConditioned
        If any eigenvalue falls below ``eig_floor`` relative to the largest.
    """
    m = _as_matrix(c)
    w, v = _gated_eigh(m, eig_floor)
    return (v * np.sqrt(w)) @ v.T


def inv_sqrt_spd(c, eig_floor: float = EIG_FLOOR) -> np.ndarray:
    """Inverse principal square root, same conditioning gate as sqrt_spd."""
    m = _as_matrix(c)
    w, v = _gated_eigh(m, eig_floor)
    return (v / np.sqrt(w)) @ v.T


def condition_number(c) -> float:
    """Eigenvalue ratio max/min of a symmetric PSD matrix; inf if min <= 0."""
    w = np.linalg.eigvalsh(_as_matrix(c))
    if w[0] <= 0:
        return np.inf
    return float(w[-1] / w[0])
