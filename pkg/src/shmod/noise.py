"""Discrete space-time white noise and exact Ornstein-Uhlenbeck mode updates.

Transform convention (pinned by tests): white noise has i.i.d. N(0, dt/dx)
samples per grid point, so each fft coefficient is Gaussian with
E|xi_k|^2 = n * dt / dx = n^2 * dt / length.  All per-mode variances below
derive from that single identity.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import ComplexField, Grid, RealField
from .operators import symbol_L_eps


@dataclass(frozen=True)
class NoiseConfig:
    seed: int
    intensity: float = 1.0
    stream_id: int = 0

    def __post_init__(self):
        if self.intensity < 0:
            raise ValueError("intensity must be non-negative")

    def make_rng(self) -> np.random.Generator:
        """Counter-based Philox stream; (seed, stream_id) keys are independent."""
        ss = np.random.SeedSequence(entropy=self.seed,
                                    spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.Philox(ss))

    def substream(self, stream_id: int) -> "NoiseConfig":
        return NoiseConfig(seed=self.seed, intensity=self.intensity,
                           stream_id=stream_id)


def spectral_variance_rate(grid: Grid, intensity: float = 1.0) -> float:
    """Per-mode variance growth rate of the fft'd cylindrical Wiener process."""
    return intensity ** 2 * grid.n_points ** 2 / grid.length


def white_increment(grid: Grid, dt: float, rng: np.random.Generator,
                    intensity: float = 1.0) -> RealField:
    """One Brownian increment: i.i.d. N(0, dt/dx) per grid point."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    scale = intensity * np.sqrt(dt / grid.dx)
    return RealField(grid, rng.standard_normal(grid.n_points) * scale)


def complex_white_increment(grid: Grid, dt: float, rng: np.random.Generator,
                            intensity: float = 1.0) -> ComplexField:
    """Complex white increment: independent re/im, each N(0, dt/(2 dx))."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    scale = intensity * np.sqrt(dt / (2.0 * grid.dx))
    z = rng.standard_normal(grid.n_points) + 1j * rng.standard_normal(grid.n_points)
    return ComplexField(grid, z * scale)


def ou_increment_variance(lam, dt: float):
    """Variance factor (e^{2 lam dt} - 1) / (2 lam) of an exact OU step.

    Continuous at lam = 0, where the factor is dt (Brownian limit); a series
    branch keeps tiny |lam*dt| exact.
    """
    lam = np.asarray(lam, dtype=np.float64)
    if np.any(lam > 0):
        raise ValueError("OU rates must be non-positive")
    x = 2.0 * lam * dt
    small = np.abs(x) < 1e-8
    out = np.where(small, dt * (1.0 + 0.5 * x),
                   np.expm1(np.where(small, 0.0, x)) / np.where(small, 1.0, 2.0 * lam))
    return out if out.ndim else float(out)


def ou_mode_step(lam: float, current: complex, dt: float,
                 noise_var_unit: float, rng: np.random.Generator) -> complex:
    """Exact update of dz = lam z dt + dW for one complex Fourier mode.

    noise_var_unit is the total complex variance per unit time of the mode's
    Wiener coefficient (re/im carry half each).
    """
    if lam > 0:
        raise ValueError("OU rates must be non-positive")
    if dt <= 0:
        raise ValueError("dt must be positive")
    var = noise_var_unit * ou_increment_variance(lam, dt)
    s = np.sqrt(var / 2.0)
    xi = rng.normal(scale=s) + 1j * rng.normal(scale=s)
    return np.exp(lam * dt) * current + xi


class SpectralNoise:
    """Per-step Hermitian spectral noise shared between paired solvers.

    ``raw(rng)`` returns the rfft of n i.i.d. standard normals, so
    E|g_k|^2 = n for every mode; an exact OU increment for rates ``lam`` is
    g * sqrt(unit * ou_increment_variance(lam, dt) / n).
    """

    def __init__(self, grid: Grid, intensity: float = 1.0):
        self.grid = grid
        self.unit = spectral_variance_rate(grid, intensity)

    def raw(self, rng: np.random.Generator) -> np.ndarray:
        return np.fft.rfft(rng.standard_normal(self.grid.n_points))

    def ou_scale(self, lam: np.ndarray, dt: float) -> np.ndarray:
        return np.sqrt(self.unit * ou_increment_variance(lam, dt)
                       / self.grid.n_points)


@dataclass
class OUState:
    """Running stochastic convolution in rfft coordinates (Hermitian half)."""

    grid: Grid
    coeffs: np.ndarray = field(repr=False)
    elapsed: float = 0.0

    @classmethod
    def zero(cls, grid: Grid) -> "OUState":
        return cls(grid, np.zeros(grid.n_points // 2 + 1, dtype=np.complex128))

    def field(self) -> RealField:
        return RealField.from_spectrum(self.grid, self.coeffs)


def stochastic_convolution_path(grid: Grid, eps: float, t_end: float, dt: float,
                                cfg: NoiseConfig):
    """Exact-in-law sampling of W_{L_eps} at step boundaries.

    Yields (T, RealField) pairs starting with (0, 0); each mode is an OU
    process with its own rate symbol_L_eps(K, eps).
    """
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    rng = cfg.make_rng()
    src = SpectralNoise(grid, cfg.intensity)
    lam = symbol_L_eps(grid.rfft_wavenumbers, eps)
    decay = np.exp(lam * dt)
    scale = src.ou_scale(lam, dt)
    state = OUState.zero(grid)
    yield 0.0, state.field()
    n_steps = int(round(t_end / dt))
    for i in range(1, n_steps + 1):
        state.coeffs = decay * state.coeffs + src.raw(rng) * scale
        state.elapsed = i * dt
        yield state.elapsed, state.field()


def stochastic_convolution_sample(grid: Grid, eps: float, T: float,
                                  cfg: NoiseConfig) -> RealField:
    """Single exact draw of W_{L_eps}(T) (one OU step from zero)."""
    rng = cfg.make_rng()
    src = SpectralNoise(grid, cfg.intensity)
    lam = symbol_L_eps(grid.rfft_wavenumbers, eps)
    return RealField.from_spectrum(grid, src.raw(rng) * src.ou_scale(lam, T))
