import numpy as np
import pytest

from shmod import (
    GLCoefficients,
    Grid,
    ModelParams,
    NoiseConfig,
    RealField,
    gl5_coefficients,
    gl_coefficients,
    modulate,
    modulated_carrier_ic,
    reduced_quadratic_correction,
    simulate_gl,
    simulate_paired,
    simulate_reduced,
)
from shmod.grid import ComplexField

DELTA = 0.125


def riccati(a0, c3, T):
    # closed-form solution of da/dT = c3 a^3 for constant initial data
    return a0 / np.sqrt(1.0 - 2.0 * c3 * a0**2 * T)


def test_cubic_coefficient_values():
    assert gl_coefficients(0.0).cubic == pytest.approx(-3.0)
    assert gl_coefficients(0.5).cubic == pytest.approx(-(3.0 - 38.0 / 36.0))
    assert gl_coefficients(1.0).cubic == pytest.approx(38.0 / 9.0 - 3.0)


def test_cubic_coefficient_sign_change_bracket():
    nu_star = np.sqrt(27.0 / 38.0)
    assert 0.80 < nu_star < 0.89
    assert gl_coefficients(0.84).cubic < 0 < gl_coefficients(0.85).cubic


def test_quintic_coefficient_values():
    c = gl5_coefficients(1.0, 0.0)
    assert c.cubic == pytest.approx(38.0 / 9.0)
    assert c.quintic == pytest.approx(-10.0)
    assert gl5_coefficients(0.0, 0.0).cubic == pytest.approx(0.0)
    assert gl5_coefficients(0.0, 1.0).cubic == pytest.approx(3.0)


def test_coefficients_reject_wrong_diffusion():
    with pytest.raises(ValueError):
        GLCoefficients(cubic=-3.0, diffusion=1.0)


def test_quadratic_correction_matches_closed_form():
    # for w = a e^{ix/eps} + c.c. the averaged quadratic interaction is
    # 2 nu^2 (19/9) a^3 (e^{ix/eps} + c.c.): -2a^3 from the mean band plus
    # -a^3/9 from the second band, times -2 nu^2
    eps, nu, a = 0.1, 0.7, 0.4
    grid = Grid.for_carrier(eps, 1024, periods=64)
    A0 = ComplexField(grid, np.full(grid.n_points, a, dtype=complex))
    w = modulate(A0, eps)
    corr = reduced_quadratic_correction(w, grid.eps, nu, delta=DELTA)
    expect = 2.0 * nu**2 * (19.0 / 9.0) * a**3 * 2.0 * np.cos(grid.x / grid.eps)
    np.testing.assert_allclose(corr.values, expect, atol=1e-12)


def test_gl_constant_data_follows_riccati_solution():
    grid = Grid.for_carrier(0.1, 128, periods=8)
    a0 = 0.5
    c = GLCoefficients(cubic=-3.0, noise_intensity=0.0)
    A0 = ComplexField(grid, np.full(grid.n_points, a0, dtype=complex))
    traj = simulate_gl(A0, c, dt=1e-3, t_end=1.0)
    assert traj.status == "completed"
    final = np.abs(traj.final.values)
    target = riccati(a0, -3.0, 1.0)
    assert np.max(np.abs(final / target - 1.0)) < 1e-4


def test_gl_blowup_time_for_positive_cubic():
    grid = Grid.for_carrier(0.1, 128, periods=8)
    a0, c3 = 1.0, 3.0
    t_star = 1.0 / (2.0 * c3 * a0**2)
    c = GLCoefficients(cubic=c3, noise_intensity=0.0)
    A0 = ComplexField(grid, np.full(grid.n_points, a0, dtype=complex))
    traj = simulate_gl(A0, c, dt=1e-4, t_end=1.0)
    assert traj.status == "blowup_stopped"
    assert traj.times[-1] == pytest.approx(t_star, rel=0.1)


def test_gl_linear_mode_decay_is_exact():
    grid = Grid.for_carrier(0.1, 128, periods=8)
    k = grid.wavenumbers[3]
    A0 = ComplexField(grid, 0.1 * np.exp(1j * k * grid.x))
    c = GLCoefficients(cubic=0.0, noise_intensity=0.0)
    T = 0.05
    traj = simulate_gl(A0, c, dt=1e-3, t_end=T)
    expect = A0.values * np.exp(-4.0 * k**2 * T)
    np.testing.assert_allclose(traj.final.values, expect, rtol=1e-12)


def test_gl_noise_determinism():
    grid = Grid.for_carrier(0.1, 128, periods=8)
    A0 = ComplexField(grid, np.zeros(grid.n_points, dtype=complex))
    c = GLCoefficients(cubic=-3.0, noise_intensity=0.2)
    cfg = NoiseConfig(seed=21, intensity=0.2)
    a = simulate_gl(A0, c, dt=1e-3, t_end=0.05, cfg=cfg)
    b = simulate_gl(A0, c, dt=1e-3, t_end=0.05, cfg=cfg)
    np.testing.assert_array_equal(a.final.values, b.final.values)


def test_reduced_band_equation_keeps_band_structure():
    # noise-free band dynamics started on the carrier band stays there
    eps = 0.1
    grid = Grid.for_carrier(eps, 1024, periods=64)
    rng = np.random.default_rng(4)
    w0 = modulated_carrier_ic(grid, grid.eps, rng, amplitude=0.3, delta=DELTA)
    p = ModelParams(eps=grid.eps, nu=0.5, dt=1e-3, t_end=0.1)
    traj = simulate_reduced(w0, p, delta=DELTA)
    assert traj.status == "completed"
    from shmod import make_kernel

    p1 = make_kernel("P1", DELTA, grid.eps, grid)
    spec = np.abs(np.fft.rfft(traj.final.values))
    outside = p1.evaluate(grid.rfft_wavenumbers) == 0.0
    assert np.max(spec[outside]) < 1e-10 * np.max(spec)


def test_paired_run_is_deterministic_and_close():
    eps = 0.1
    grid = Grid.for_carrier(eps, 1024, periods=64)
    rng = np.random.default_rng(8)
    v0 = modulated_carrier_ic(grid, grid.eps, rng, amplitude=0.3, delta=DELTA)
    p = ModelParams(eps=grid.eps, nu=0.5, dt=1e-3, t_end=0.2)
    cfg = NoiseConfig(seed=31, intensity=0.05)
    r1 = simulate_paired(v0, p, cfg, delta=DELTA)
    r2 = simulate_paired(v0, p, cfg, delta=DELTA)
    assert r1.sup_diff == r2.sup_diff
    np.testing.assert_array_equal(r1.traj_v.final.values,
                                  r2.traj_v.final.values)
    assert r1.status == "completed"
    # the band approximation tracks the full solution at this bandwidth
    assert r1.sup_diff < 0.1
