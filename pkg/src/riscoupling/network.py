"""Decoupling-network algebra and channel assembly.

The conventional multiport channel is

    z = z_DS - z_DR^T (Z_R + Z_N)^(-1) z_RS

with Z_R the array coupling matrix and Z_N the tunable load network.
Inserting a lossless reciprocal 2N-port between array and loads replaces
Z_N by the transformed network

    Z_N' = Z22 - Z12^T (Z11 + Z_N)^(-1) Z12.

The power-matching choice (Z11 = 0, Z12 = -j sqrt(R) Re(Z_R)^(1/2),
Z22 = -j Im(Z_R)) turns the whole system into uncoupled-model form with
effective channels z_DR Re(Z_R)^(-1/2) sqrt(R) and
sqrt(R) Re(Z_R)^(-1/2) z_RS, which is what makes closed-form phase
optimization possible.

``assemble_channel`` evaluates the full multiport model for any
configuration; ``scattering_channel`` evaluates the equivalent
uncoupled-form expression z_DS + 1/(2R) z_DR^T (diag(theta) - I) z_RS.
The explicit network composition (``power_matching_network`` +
``apply_decoupling`` + the full solve) and the uncoupled-form evaluation
are independent routes to the same channel and are cross-checked in the
tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

from .coupling import (
    ImpedanceMatrix,
    build_coupling_matrix,
    coupling_real_part,
    inv_sqrt_spd,
    sqrt_spd,
    steering_vector,
    with_ohmic_loss,
)
from .errors import SingularNetwork

#: Reciprocal-condition floor for network linear solves.
RCOND_FLOOR = 1e-13

#: Tolerance for losslessness / reciprocity checks of network blocks.
LOSSLESS_TOL = 1e-10


def solve_gated(a: np.ndarray, b: np.ndarray, transpose: bool = False) -> np.ndarray:
    """LU solve with an explicit reciprocal-condition estimate.

    Raises SingularNetwork when the 1-norm rcond estimate falls below
    RCOND_FLOOR; silent garbage near network resonances is worse than a
    loud failure.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    anorm = np.linalg.norm(a, 1)
    lu, piv, info = lapack.zgetrf(a)
    if info > 0:
        raise SingularNetwork("network matrix is exactly singular")
    if info < 0:
        raise ValueError(f"illegal argument {-info} to zgetrf")
    rcond, _ = lapack.zgecon(lu, anorm)
    if not np.isfinite(rcond) or rcond < RCOND_FLOOR:
        raise SingularNetwork(
            f"network solve rcond {rcond:.3e} below {RCOND_FLOOR:.1e}"
        )
    b2d = b if b.ndim == 2 else b[:, None]
    x, info = lapack.zgetrs(lu, piv, b2d, trans=1 if transpose else 0)
    if info != 0:
        raise SingularNetwork("back substitution failed")
    return x if b.ndim == 2 else x[:, 0]


@dataclass(frozen=True)
class DecouplingNetwork:
    """Lossless reciprocal 2N-port in block form (z11, z12, z22), Ohms."""

    z11: np.ndarray
    z12: np.ndarray
    z22: np.ndarray

    def __post_init__(self):
        blocks = {}
        for name in ("z11", "z12", "z22"):
            m = np.atleast_2d(np.asarray(getattr(self, name), dtype=complex))
            blocks[name] = m
        n = blocks["z11"].shape[0]
        for name, m in blocks.items():
            if m.shape != (n, n):
                raise ValueError(f"{name} must be {n}x{n}, got {m.shape}")
            scale = max(1.0, float(np.abs(m).max()))
            if np.abs(m.real).max() > LOSSLESS_TOL * scale:
                raise ValueError(f"{name} is not lossless (nonzero real part)")
            if name != "z12" and np.abs(m - m.T).max() > LOSSLESS_TOL * scale:
                raise ValueError(f"{name} is not symmetric")
            object.__setattr__(self, name, m)

    @property
    def n(self) -> int:
        return self.z11.shape[0]

    def full_matrix(self) -> np.ndarray:
        """The assembled 2N x 2N (symmetric) impedance matrix."""
        top = np.hstack([self.z11, self.z12])
        bot = np.hstack([self.z12.T, self.z22])
        return np.vstack([top, bot])


@dataclass(frozen=True)
class ChannelTriple:
    """The three channel blocks (Ohms) plus their pathloss factors.

    For the SISO case z_ds is a complex scalar and z_dr, z_rs are length-N
    vectors.  Matrix-valued blocks (multi-antenna endpoints) pass through
    channel assembly unchanged, but the optimizers accept only the SISO
    slice.
    """

    z_ds: complex
    z_dr: np.ndarray
    z_rs: np.ndarray
    gamma_dr: float = 1.0
    gamma_rs: float = 1.0

    def __post_init__(self):
        z_dr = np.asarray(self.z_dr, dtype=complex)
        z_rs = np.asarray(self.z_rs, dtype=complex)
        n_dr = z_dr.shape[-1]
        n_rs = z_rs.shape[0]
        if n_dr != n_rs:
            raise ValueError(f"inconsistent element counts {n_dr} vs {n_rs}")
        for name, z in (("z_dr", z_dr), ("z_rs", z_rs)):
            if not np.isfinite(z).all():
                raise ValueError(f"{name} has non-finite entries")
        if not np.isfinite(self.z_ds):
            raise ValueError("z_ds is not finite")
        if self.gamma_dr < 0 or self.gamma_rs < 0:
            raise ValueError("pathloss factors must be nonnegative")
        object.__setattr__(self, "z_dr", z_dr)
        object.__setattr__(self, "z_rs", z_rs)

    @property
    def n(self) -> int:
        return self.z_rs.shape[0]


@dataclass(frozen=True)
class DiagonalConfig:
    """Diagonal reflection state: unit-modulus coefficients of the
    uncoupled-form model (theta-bar in decoupled mode)."""

    phases: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.phases, dtype=complex).ravel()
        if np.abs(np.abs(p) - 1.0).max() > 1e-12:
            raise ValueError("diagonal reflection coefficients must be unit modulus")
        object.__setattr__(self, "phases", p)


@dataclass(frozen=True)
class ImpedanceConfig:
    """Explicit lossless reciprocal load network."""

    z_n: ImpedanceMatrix

    def __post_init__(self):
        z = self.z_n.entries
        scale = max(1.0, float(np.abs(z).max()))
        if np.abs(z.real).max() > LOSSLESS_TOL * scale:
            raise ValueError("load network must be lossless (Re = 0)")


@dataclass(frozen=True)
class BDConfig:
    """Marker for the fully-connected architecture whose gain is computed
    by formula; the achieving matrix is never materialized."""


RISConfig = DiagonalConfig | ImpedanceConfig | BDConfig


@dataclass(frozen=True)
class Scenario:
    """Geometry and physics parameters of one LOS evaluation point."""

    n: int
    d: float
    alpha_tx: float = 0.0
    alpha_rx: float = np.pi
    gamma: float = 0.0
    r: float = 1.0
    gamma_dr: float = 1.0
    gamma_rs: float = 1.0
    z_ds: complex = 0j

    def coupling(self) -> ImpedanceMatrix:
        """Array impedance matrix including the ohmic-loss diagonal."""
        return with_ohmic_loss(build_coupling_matrix(self.n, self.d, self.r), self.gamma)

    def triple(self) -> ChannelTriple:
        return los_triple(
            self.n, self.d, self.alpha_tx, self.alpha_rx,
            gamma_dr=self.gamma_dr, gamma_rs=self.gamma_rs,
            r=self.r, z_ds=self.z_ds,
        )


def los_triple(
    n: int,
    d: float,
    alpha_tx: float,
    alpha_rx: float,
    gamma_dr: float = 1.0,
    gamma_rs: float = 1.0,
    r: float = 1.0,
    z_ds: complex = 0j,
) -> ChannelTriple:
    """LOS channel blocks: z_dr = sqrt(g_DR) R a(alpha_rx), z_rs likewise."""
    a_dr = steering_vector(n, d, alpha_rx).entries
    a_rs = steering_vector(n, d, alpha_tx).entries
    return ChannelTriple(
        z_ds=complex(z_ds),
        z_dr=np.sqrt(gamma_dr) * r * a_dr,
        z_rs=np.sqrt(gamma_rs) * r * a_rs,
        gamma_dr=gamma_dr,
        gamma_rs=gamma_rs,
    )


def power_matching_network(z_r: ImpedanceMatrix) -> DecouplingNetwork:
    """The decoupling network that diagonalizes the array coupling.

    Blocks: z11 = 0, z12 = -j sqrt(R) Re(Z_R)^(1/2), z22 = -j Im(Z_R).
    """
    r = z_r.ref_resistance
    c = coupling_real_part(z_r)
    root = np.sqrt(r) * (np.sqrt(r) * sqrt_spd(c))  # sqrt(R) * Re(Z_R)^(1/2)
    n = z_r.n
    return DecouplingNetwork(
        z11=np.zeros((n, n), dtype=complex),
        z12=-1j * root,
        z22=-1j * z_r.entries.imag,
    )


def apply_decoupling(den: DecouplingNetwork, z_n: ImpedanceMatrix) -> ImpedanceMatrix:
    """Transformed load network z22 - z12^T (z11 + Z_N)^(-1) z12."""
    inner = solve_gated(den.z11 + z_n.entries, den.z12)
    out = den.z22 - den.z12.T @ inner
    return ImpedanceMatrix(out, z_n.ref_resistance)


def effective_channels(triple: ChannelTriple, z_r: ImpedanceMatrix) -> ChannelTriple:
    """Channels seen through the power-matching network.

    z_dr -> z_dr Re(Z_R)^(-1/2) sqrt(R) and
    z_rs -> sqrt(R) Re(Z_R)^(-1/2) z_rs, which reduce to
    z @ C^(-1/2) with the dimensionless C = Re(Z_R)/R.
    """
    w = inv_sqrt_spd(coupling_real_part(z_r))
    return ChannelTriple(
        z_ds=triple.z_ds,
        z_dr=triple.z_dr @ w,
        z_rs=w @ triple.z_rs,
        gamma_dr=triple.gamma_dr,
        gamma_rs=triple.gamma_rs,
    )


def impedance_to_scattering(z_n: ImpedanceMatrix) -> np.ndarray:
    """Reflection matrix (Z_N - R I)(Z_N + R I)^(-1).

    Symmetric unitary (within 1e-10) for lossless reciprocal inputs.
    """
    r = z_n.ref_resistance
    eye = r * np.eye(z_n.n)
    # the two factors commute, so the one-sided solve is exact algebra
    return solve_gated(z_n.entries + eye, z_n.entries - eye)


def scattering_to_impedance(theta: np.ndarray, r: float = 1.0) -> ImpedanceMatrix:
    """Inverse map Z_N = R (I + Theta)(I - Theta)^(-1)."""
    theta = np.atleast_2d(np.asarray(theta, dtype=complex))
    eye = np.eye(theta.shape[0])
    z = r * solve_gated(eye - theta, eye + theta)
    return ImpedanceMatrix(z, r)


def scattering_channel(triple: ChannelTriple, phases: np.ndarray, r: float = 1.0):
    """Uncoupled-form channel z_DS + 1/(2R) z_DR^T (diag(phases) - I) z_RS.

    For a decoupled system pass the effective triple; for an ideal
    uncoupled array pass the raw triple.
    """
    phases = np.asarray(phases, dtype=complex)
    weighted = (phases - 1.0) * triple.z_rs if triple.z_rs.ndim == 1 else (phases - 1.0)[:, None] * triple.z_rs
    return triple.z_ds + (0.5 / r) * (triple.z_dr @ weighted)


def _conventional_channel(triple: ChannelTriple, z_r_entries: np.ndarray, z_n_entries: np.ndarray):
    return triple.z_ds - triple.z_dr @ solve_gated(z_r_entries + z_n_entries, triple.z_rs)


def _conventional_scattering_channel(
    triple: ChannelTriple, z_r_entries: np.ndarray, phases: np.ndarray, r: float
):
    # pole-free equivalent of routing diag reflection coefficients through
    # Z_N = R (I+Theta)(I-Theta)^(-1): with M = (Z_R + R I) - (Z_R - R I) Theta,
    # (Z_R + Z_N)^(-1) = (I - Theta) M^(-1).  Continuous at theta = 1
    # (open-circuited element), where the impedance detour is singular.
    n = z_r_entries.shape[0]
    eye = np.eye(n)
    m = (z_r_entries + r * eye) - (z_r_entries - r * eye) * phases[None, :]
    sol = solve_gated(m, triple.z_rs)
    weighted = sol - phases * sol if sol.ndim == 1 else sol - phases[:, None] * sol
    return triple.z_ds - triple.z_dr @ weighted


def assemble_channel(
    triple: ChannelTriple,
    z_r: ImpedanceMatrix,
    config: RISConfig,
    decoupled: bool = False,
):
    """End-to-end channel z_DS - z_DR^T (Z_R + Z_N)^(-1) z_RS.

    With ``decoupled=True`` the configured load network is composed with
    the power-matching decoupling network; a DiagonalConfig is then
    interpreted as theta-bar, the reflection coefficients of the
    equivalent uncoupled-form model (physical Theta = -theta-bar).  For
    diagonal configs the composition is evaluated in its pole-free
    algebraic form (the impedance detour through
    ``scattering_to_impedance`` and ``apply_decoupling`` is exactly
    singular at theta-bar = +-1 and loses accuracy like eps/dist^2 near
    them; the explicit-op route stays available through ImpedanceConfig).

    Without decoupling, a DiagonalConfig holds the physical reflection
    coefficients of the load diag and is likewise evaluated through a
    pole-free reformulation of the same expression.
    """
    if isinstance(config, BDConfig):
        raise TypeError(
            "the fully-connected gain is computed by formula (bd_gain); "
            "there is no materialized network to assemble"
        )
    r = z_r.ref_resistance
    if isinstance(config, ImpedanceConfig):
        z_n = config.z_n
        if decoupled:
            z_n = apply_decoupling(power_matching_network(z_r), z_n)
        return _conventional_channel(triple, z_r.entries, z_n.entries)
    if isinstance(config, DiagonalConfig):
        if decoupled:
            return scattering_channel(effective_channels(triple, z_r), config.phases, r)
        return _conventional_scattering_channel(triple, z_r.entries, config.phases, r)
    raise TypeError(f"unsupported RIS configuration {type(config).__name__}")


def bd_equivalent_network(x_n_prime: np.ndarray, z_r: ImpedanceMatrix) -> ImpedanceMatrix:
    """Direct fully-connected load equivalent to a decoupled network.

    Z_N = -j Im(Z_R) + (j/R) Re(Z_R)^(1/2) X' Re(Z_R)^(1/2) for any real
    symmetric X'.  Assembling the conventional channel with this network
    reproduces the decoupled-form channel with load jX'.
    """
    x = np.atleast_2d(np.asarray(x_n_prime, dtype=float))
    if np.abs(x - x.T).max() > LOSSLESS_TOL * max(1.0, float(np.abs(x).max())):
        raise ValueError("X' must be real symmetric (lossless reciprocal)")
    c_root = sqrt_spd(coupling_real_part(z_r))  # Re(Z_R)^(1/2) / sqrt(R)
    z = -1j * z_r.entries.imag + 1j * (c_root @ x @ c_root)
    return ImpedanceMatrix(z, z_r.ref_resistance)
