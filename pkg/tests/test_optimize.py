"""Closed-form gain optimization and the coupled-model baselines."""

import numpy as np
import pytest

from riscoupling import (
    ChannelTriple,
    ImpedanceMatrix,
    Method,
    bd_gain,
    build_coupling_matrix,
    closed_form_diagonal_gain,
    conventional_gain_and_gradient,
    effective_channels,
    gradient_coupled_baseline,
    ignore_mc_baseline,
    los_triple,
    optimal_diagonal_phases,
    scattering_channel,
)

# sub-ulp slack for mathematically-tied gains evaluated through two
# expressions (Cauchy-Schwarz equality cases)
TIE_SLACK = 5e-15


def random_triple(rng, n, z_ds=None):
    blocks = rng.normal(size=(2, n)) + 1j * rng.normal(size=(2, n))
    if z_ds is None:
        z_ds = complex(rng.normal() + 1j * rng.normal())
    return ChannelTriple(z_ds=z_ds, z_dr=blocks[0], z_rs=blocks[1])


def test_symmetric_triple_aligns_all_phases():
    triple = ChannelTriple(z_ds=0j, z_dr=np.array([1.0, 1.0]), z_rs=np.array([1.0, 1.0]))
    cfg = optimal_diagonal_phases(triple)
    assert np.abs(cfg.phases - cfg.phases[0]).max() < 1e-12
    # coherent sum: |(-1/2)*2| + 2/2 = 2 -> gain 4
    assert closed_form_diagonal_gain(triple).channel_gain == pytest.approx(4.0, rel=1e-12)


def test_single_element_gain_normalization():
    triple = los_triple(1, 0.3, 0.2, 2.1, gamma_dr=0.6, gamma_rs=1.7, r=2.0)
    res = closed_form_diagonal_gain(triple, r=2.0)
    assert res.channel_gain == pytest.approx(0.6 * 1.7 * 4.0, rel=1e-12)
    assert res.array_gain == pytest.approx(1.0, rel=1e-12)
    bd = bd_gain(triple, r=2.0)
    assert bd.channel_gain == pytest.approx(res.channel_gain, rel=1e-12)


def test_zero_reflection_channel_gain():
    triple = ChannelTriple(z_ds=1.5 - 0.5j, z_dr=np.zeros(3), z_rs=np.ones(3))
    res = closed_form_diagonal_gain(triple)
    assert res.channel_gain == pytest.approx(abs(1.5 - 0.5j) ** 2, rel=1e-12)


def test_half_wavelength_front_fire_value():
    # all-ones steering at lambda/2: gain (|a.a| + N)^2 / 4 = N^2
    triple = los_triple(4, 0.5, np.pi / 2, np.pi / 2)
    eff = effective_channels(triple, build_coupling_matrix(4, 0.5))
    res = closed_form_diagonal_gain(eff)
    assert res.array_gain == pytest.approx(16.0, rel=1e-10)


@pytest.mark.parametrize("seed", range(8))
def test_closed_form_matches_direct_evaluation(seed):
    rng = np.random.default_rng(1000 + seed)
    n = int(rng.integers(1, 9))
    triple = random_triple(rng, n)
    cfg = optimal_diagonal_phases(triple)
    direct = abs(scattering_channel(triple, cfg.phases)) ** 2
    res = closed_form_diagonal_gain(triple)
    assert direct == pytest.approx(res.channel_gain, rel=1e-9)


@pytest.mark.parametrize("seed", range(8))
def test_closed_form_beats_random_configs(seed):
    rng = np.random.default_rng(2000 + seed)
    n = int(rng.integers(1, 9))
    triple = random_triple(rng, n)
    best = closed_form_diagonal_gain(triple).channel_gain
    phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=(1000, n)))
    weighted = (phases - 1.0) * triple.z_rs[None, :]
    gains = np.abs(triple.z_ds + 0.5 * weighted @ triple.z_dr) ** 2
    assert gains.max() <= best * (1 + 1e-12)


@pytest.mark.parametrize("seed", range(8))
def test_bd_dominates_diagonal(seed):
    rng = np.random.default_rng(3000 + seed)
    n = int(rng.integers(1, 9))
    triple = random_triple(rng, n)
    assert bd_gain(triple).channel_gain >= closed_form_diagonal_gain(triple).channel_gain * (1 - TIE_SLACK)


def test_bd_equals_diagonal_on_aligned_moduli():
    # entrywise-aligned moduli: Cauchy-Schwarz equality
    rng = np.random.default_rng(17)
    n = 5
    z_rs = rng.normal(size=n) + 1j * rng.normal(size=n)
    z_dr = 0.7 * np.conj(z_rs)
    triple = ChannelTriple(z_ds=0.3 + 0.1j, z_dr=z_dr, z_rs=z_rs)
    d = closed_form_diagonal_gain(triple).channel_gain
    b = bd_gain(triple).channel_gain
    assert b == pytest.approx(d, rel=1e-12)
    assert b >= d * (1 - TIE_SLACK)


def test_specular_los_equals_quadratic_form():
    n, d = 5, 0.3
    alpha = 2.2
    z_r = build_coupling_matrix(n, d)
    triple = los_triple(n, d, np.pi - alpha, alpha)
    eff = effective_channels(triple, z_r)
    diag = closed_form_diagonal_gain(eff).array_gain
    bd = bd_gain(eff).array_gain
    c = z_r.entries.real
    a = np.exp(-1j * np.arange(n) * 2 * np.pi * d * np.cos(alpha))
    ref = float((a.conj() @ np.linalg.solve(c, a)).real ** 2)
    assert diag == pytest.approx(ref, rel=1e-9)
    assert bd == pytest.approx(ref, rel=1e-9)


def test_array_gain_invariant_under_reference_resistance():
    vals = {}
    for r in (1.0, 50.0, 75.0):
        z_r = build_coupling_matrix(4, 0.23, r)
        triple = los_triple(4, 0.23, 0.4, 2.5, gamma_dr=0.8, gamma_rs=1.2, r=r)
        eff = effective_channels(triple, z_r)
        vals[r] = (
            closed_form_diagonal_gain(eff, r=r).array_gain,
            bd_gain(eff, r=r).array_gain,
            ignore_mc_baseline(triple, z_r).array_gain,
        )
    base = np.array(vals[1.0])
    for r in (50.0, 75.0):
        np.testing.assert_allclose(np.array(vals[r]), base, rtol=1e-10)


def test_optimal_phases_invariant_under_scaling():
    rng = np.random.default_rng(23)
    triple = random_triple(rng, 6, z_ds=0j)
    scale = 2.3 * np.exp(0.7j)
    scaled = ChannelTriple(z_ds=0j, z_dr=scale * triple.z_dr, z_rs=triple.z_rs)
    cfg = optimal_diagonal_phases(triple)
    cfg_scaled = optimal_diagonal_phases(scaled)
    np.testing.assert_allclose(cfg_scaled.phases, cfg.phases, atol=1e-12)
    g = closed_form_diagonal_gain(triple).channel_gain
    g_scaled = closed_form_diagonal_gain(scaled).channel_gain
    assert g_scaled == pytest.approx(abs(scale) ** 2 * g, rel=1e-12)


def test_zero_product_entries_get_zero_phase():
    # base term and first product are both exactly zero; arg(0) := 0 keeps
    # the dead element's phase deterministic at 1
    triple = ChannelTriple(z_ds=0.5 + 0j, z_dr=np.array([0.0, 1.0]), z_rs=np.array([1.0, 1.0]))
    cfg = optimal_diagonal_phases(triple)
    assert cfg.phases[0] == 1.0 + 0j


def test_ignore_mc_equals_optimal_when_assumption_true():
    z_id = ImpedanceMatrix(np.eye(4, dtype=complex), 1.0)
    triple = los_triple(4, 0.5, 0.7, 2.0)
    res = ignore_mc_baseline(triple, z_id)
    ref = closed_form_diagonal_gain(triple)
    assert res.channel_gain == pytest.approx(ref.channel_gain, rel=1e-10)
    assert res.condition_number == pytest.approx(1.0)


def test_ignore_mc_single_element_is_optimal():
    z_r = build_coupling_matrix(1, 0.3)
    triple = los_triple(1, 0.3, 0.0, np.pi)
    res = ignore_mc_baseline(triple, z_r)
    assert res.array_gain == pytest.approx(1.0, rel=1e-10)


def test_ignore_mc_below_decoupled_at_tight_spacing():
    n, d = 4, 1 / 32
    z_r = build_coupling_matrix(n, d)
    triple = los_triple(n, d, 0.0, np.pi)
    naive = ignore_mc_baseline(triple, z_r).array_gain
    decoupled = closed_form_diagonal_gain(effective_channels(triple, z_r)).array_gain
    assert naive < decoupled


@pytest.mark.parametrize("seed", range(5))
def test_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(4000 + seed)
    n = int(rng.integers(2, 7))
    d = float(rng.uniform(0.15, 0.6))
    z_r = build_coupling_matrix(n, d)
    triple = random_triple(rng, n)
    phi = rng.uniform(0.1, 2 * np.pi - 0.1, n)
    _, grad = conventional_gain_and_gradient(phi, triple, z_r)
    h = 1e-6
    fd = np.empty(n)
    for i in range(n):
        step = np.zeros(n)
        step[i] = h
        up, _ = conventional_gain_and_gradient(phi + step, triple, z_r)
        dn, _ = conventional_gain_and_gradient(phi - step, triple, z_r)
        fd[i] = (up - dn) / (2 * h)
    scale = max(np.abs(fd).max(), 1e-8)
    np.testing.assert_allclose(grad, fd, atol=1e-4 * scale)


def test_gradient_recovers_closed_form_without_coupling():
    z_id = ImpedanceMatrix(np.eye(5, dtype=complex), 1.0)
    triple = los_triple(5, 0.5, 0.4, 2.3)
    res = gradient_coupled_baseline(triple, z_id)
    ref = closed_form_diagonal_gain(triple).channel_gain
    assert res.converged
    assert res.channel_gain == pytest.approx(ref, rel=1e-6)


def test_gradient_objective_monotone_and_beats_start():
    n, d = 4, 0.2
    z_r = build_coupling_matrix(n, d)
    triple = los_triple(n, d, 0.0, np.pi)
    start = ignore_mc_baseline(triple, z_r).channel_gain
    res = gradient_coupled_baseline(triple, z_r, max_iters=300)
    assert res.channel_gain >= start * (1 - 1e-12)
    assert res.method is Method.GRADIENT
    assert res.iterations <= 300


def test_decoupled_dominates_conventional_gradient_at_half_wavelength():
    # at lambda/2 the decoupled system reaches the uncoupled optimum; the
    # conventional coupled model (imaginary coupling still present) cannot
    # exceed it
    for seed in range(3):
        rng = np.random.default_rng(5000 + seed)
        n = int(rng.integers(2, 7))
        z_r = build_coupling_matrix(n, 0.5)
        triple = los_triple(n, 0.5, float(rng.uniform(0, np.pi)), float(rng.uniform(0, np.pi)))
        decoupled = closed_form_diagonal_gain(effective_channels(triple, z_r)).channel_gain
        conventional = gradient_coupled_baseline(triple, z_r, max_iters=2000).channel_gain
        assert decoupled >= conventional * (1 - 1e-9)


def test_gradient_iteration_cap():
    n, d = 4, 1 / 16
    z_r = build_coupling_matrix(n, d)
    triple = los_triple(n, d, 0.0, np.pi)
    res = gradient_coupled_baseline(triple, z_r, max_iters=3)
    assert res.iterations <= 3


def test_optimizers_reject_matrix_blocks():
    rng = np.random.default_rng(1)
    triple = ChannelTriple(
        z_ds=0j,
        z_dr=rng.normal(size=(2, 3)) + 0j,
        z_rs=rng.normal(size=(3, 2)) + 0j,
    )
    with pytest.raises(ValueError):
        optimal_diagonal_phases(triple)
    with pytest.raises(ValueError):
        bd_gain(triple)
