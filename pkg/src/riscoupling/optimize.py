"""SISO channel-gain maximization.

On the uncoupled-form model (raw channels for an ideal array, effective
channels for a decoupled one) the optimal diagonal phases and the
resulting gain are closed-form; the fully-connected gain is a
Cauchy-Schwarz bound that is known to be achieved.  Two iterative
baselines operate on the conventional coupled model: phase optimization
that ignores coupling, and projected gradient ascent on the reflection
phases.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .coupling import ImpedanceMatrix, condition_number, coupling_real_part
from .errors import SingularNetwork
from .network import (
    ChannelTriple,
    DiagonalConfig,
    BDConfig,
    RISConfig,
    assemble_channel,
    solve_gated,
)


class Method(str, Enum):
    DECOUPLED_DIAG = "decoupled_diag"
    BD = "bd"
    UNCOUPLED = "uncoupled"
    IGNORE_MC = "ignore_mc"
    GRADIENT = "gradient"


@dataclass
class GainResult:
    """Outcome of one gain maximization."""

    method: Method
    channel_gain: float
    array_gain: float
    config: RISConfig | None = None
    iterations: int = 0
    converged: bool = True
    condition_number: float = field(default=np.nan)


def _array_gain(channel_gain: float, triple: ChannelTriple, r: float) -> float:
    norm = triple.gamma_dr * triple.gamma_rs * r * r
    return channel_gain / norm if norm > 0 else np.nan


def _require_siso(triple: ChannelTriple) -> ChannelTriple:
    if triple.z_dr.ndim != 1 or triple.z_rs.ndim != 1:
        raise ValueError("gain optimization accepts only the SISO slice")
    return triple


def _direct_term(triple: ChannelTriple, r: float) -> complex:
    return triple.z_ds - (0.5 / r) * (triple.z_dr @ triple.z_rs)


def optimal_diagonal_phases(triple: ChannelTriple, r: float = 1.0) -> DiagonalConfig:
    """Phase-aligning solution for the uncoupled-form model.

    Entry n gets phase arg(z_DS - z_DR^T z_RS / 2R) - arg(z_DR,n z_RS,n);
    a zero product contributes nothing to the gain, and numpy's arg(0) = 0
    keeps the choice deterministic.
    """
    _require_siso(triple)
    base = _direct_term(triple, r)
    prod = triple.z_dr * triple.z_rs
    return DiagonalConfig(np.exp(1j * (np.angle(base) - np.angle(prod))))


def closed_form_diagonal_gain(
    triple: ChannelTriple, r: float = 1.0, method: Method = Method.DECOUPLED_DIAG
) -> GainResult:
    """Optimal diagonal gain (|base| + sum_n |z_DR,n||z_RS,n| / 2R)^2."""
    _require_siso(triple)
    base = _direct_term(triple, r)
    nd = np.abs(triple.z_dr)
    nr = np.abs(triple.z_rs)
    gain = (abs(base) + (0.5 / r) * np.sum(nd * nr)) ** 2
    return GainResult(
        method=method,
        channel_gain=float(gain),
        array_gain=_array_gain(float(gain), triple, r),
        config=optimal_diagonal_phases(triple, r),
    )


def bd_gain(triple: ChannelTriple, r: float = 1.0) -> GainResult:
    """Fully-connected gain (|base| + ||z_DR|| ||z_RS|| / 2R)^2.

    The achieving reflection matrix exists but is not constructed; only
    the value enters the analysis.  The norm product is evaluated as a
    single square root of the product of the squared sums, so that the
    mathematical tie with the diagonal gain in specular geometries is an
    exact tie in floating point too.
    """
    _require_siso(triple)
    base = _direct_term(triple, r)
    nd = np.abs(triple.z_dr)
    nr = np.abs(triple.z_rs)
    t2 = np.sqrt(np.sum(nd * nd) * np.sum(nr * nr))
    gain = (abs(base) + (0.5 / r) * t2) ** 2
    return GainResult(
        method=Method.BD,
        channel_gain=float(gain),
        array_gain=_array_gain(float(gain), triple, r),
        config=BDConfig(),
    )


def ignore_mc_baseline(triple: ChannelTriple, z_r: ImpedanceMatrix) -> GainResult:
    """Optimize as if the array were uncoupled, evaluate with the real one.

    The phase solution assumes Z_R = R I (so the raw channels are the
    uncoupled-form channels and the closed form applies); the resulting
    reflection coefficients then drive the conventional coupled model.
    """
    r = z_r.ref_resistance
    cfg = optimal_diagonal_phases(triple, r)
    z = assemble_channel(triple, z_r, cfg, decoupled=False)
    gain = float(abs(z) ** 2)
    return GainResult(
        method=Method.IGNORE_MC,
        channel_gain=gain,
        array_gain=_array_gain(gain, triple, r),
        config=cfg,
        condition_number=condition_number(coupling_real_part(z_r)),
    )


def conventional_gain_and_gradient(
    phi: np.ndarray, triple: ChannelTriple, z_r: ImpedanceMatrix
):
    """|z(phi)|^2 and its gradient for the conventional diagonal model.

    phi are the reflection phases theta_n = exp(j phi_n).  Uses the
    pole-free form (Z_R + Z_N)^(-1) = (I - Theta) M^(-1) with
    M = (Z_R + R I) - (Z_R - R I) Theta; one factorization yields the
    channel and, through the transposed solve, the exact gradient.
    """
    r = z_r.ref_resistance
    zr = z_r.entries
    n = z_r.n
    theta = np.exp(1j * np.asarray(phi, dtype=float))
    shifted = zr - r * np.eye(n)
    m = (zr + r * np.eye(n)) - shifted * theta[None, :]
    w = solve_gated(m, triple.z_rs)
    u = solve_gated(m, (1.0 - theta) * triple.z_dr, transpose=True)
    z = triple.z_ds - triple.z_dr @ (w - theta * w)
    dz = 1j * theta * (triple.z_dr - shifted @ u) * w
    grad = 2.0 * np.real(np.conj(z) * dz)
    return float(abs(z) ** 2), grad


def _conventional_gain(phi, triple, z_r) -> float:
    cfg = DiagonalConfig(np.exp(1j * np.asarray(phi, dtype=float)))
    return float(abs(assemble_channel(triple, z_r, cfg)) ** 2)


def gradient_coupled_baseline(
    triple: ChannelTriple,
    z_r: ImpedanceMatrix,
    max_iters: int = 10000,
    tol: float = 1e-9,
    initial_step: float = 1.0,
    shrink: float = 0.5,
    slope: float = 1e-4,
    min_step: float = 1e-14,
) -> GainResult:
    """Projected gradient ascent on the conventional coupled model.

    Initialized from the coupling-blind solution, with Armijo
    backtracking; the accepted objective sequence is non-decreasing.
    Terminates when the relative improvement of an accepted step drops
    below ``tol``, when no ascent step of at least ``min_step`` exists,
    or after ``max_iters`` accepted steps (then ``converged=False``).

    Raises SingularNetwork if the model is singular at the current
    iterate; singular trial points during backtracking are treated as
    rejected steps.
    """
    r = z_r.ref_resistance
    phi = np.angle(optimal_diagonal_phases(triple, r).phases)
    iterations = 0
    converged = False
    try:
        gain, grad = conventional_gain_and_gradient(phi, triple, z_r)
    except SingularNetwork as exc:
        raise SingularNetwork(f"singular at initialization: {exc}") from exc
    while iterations < max_iters:
        slope_sq = float(grad @ grad)
        if slope_sq == 0.0:
            converged = True
            break
        step = initial_step
        trial_gain = None
        while step >= min_step:
            trial_phi = phi + step * grad
            try:
                candidate = _conventional_gain(trial_phi, triple, z_r)
            except SingularNetwork:
                candidate = -np.inf
            if candidate >= gain + slope * step * slope_sq:
                trial_gain = candidate
                break
            step *= shrink
        if trial_gain is None:
            # no admissible ascent direction at line-search resolution
            converged = True
            break
        improvement = (trial_gain - gain) / max(gain, np.finfo(float).tiny)
        phi = phi + step * grad
        gain = trial_gain
        iterations += 1
        if improvement < tol:
            converged = True
            break
        try:
            gain, grad = conventional_gain_and_gradient(phi, triple, z_r)
        except SingularNetwork as exc:
            raise SingularNetwork(
                f"singular at iterate {iterations}: {exc}"
            ) from exc
    return GainResult(
        method=Method.GRADIENT,
        channel_gain=gain,
        array_gain=_array_gain(gain, triple, r),
        config=DiagonalConfig(np.exp(1j * phi)),
        iterations=iterations,
        converged=converged,
        condition_number=condition_number(coupling_real_part(z_r)),
    )
