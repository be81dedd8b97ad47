"""Time integration of the rescaled stochastic Swift-Hohenberg equation.

Cubic variant:   dv/dT = L_eps v + nu/eps v^2 - v^3 + dW/dT
Quintic variant: dv/dT = L_eps v + nu2/eps v^2 + nu3 v^3 - v^5 + dW/dT

The stepper is ETD1 exponential Euler: the linear flow and the additive
noise are exact per Fourier mode, the nonlinearity enters through
dt*phi1(lam*dt), which reproduces the exact quasi-steady response of the
stiff slaved modes (essential for the quadratic-interaction coefficients).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import Grid, RealField
from .noise import NoiseConfig, SpectralNoise
from .operators import dealiased_powers, symbol_L_eps
from .bands import DEFAULT_DELTA, make_kernel, modulate

CUBIC = "cubic"
QUINTIC = "quintic"


class BlowupStopped(Exception):
    """Raised when the sup norm crosses the blow-up guard."""


@dataclass(frozen=True)
class ModelParams:
    variant: str = CUBIC
    eps: float = 0.1
    nu: float = 0.0
    nu2: float = 0.0
    nu3: float = 0.0
    dt: float = 1e-3
    t_end: float = 1.0
    blowup_threshold: float = 1e4

    def __post_init__(self):
        if self.variant not in (CUBIC, QUINTIC):
            raise ValueError(f"unknown variant {self.variant!r}")
        if not (0 < self.eps < 1):
            raise ValueError("eps must lie in (0, 1)")
        if self.dt <= 0 or self.t_end <= 0 or self.blowup_threshold <= 0:
            raise ValueError("dt, t_end and blowup_threshold must be positive")

    @property
    def amplitude_scale(self) -> float:
        """u = scale * v: eps for the cubic case, sqrt(eps) for the quintic."""
        return self.eps if self.variant == CUBIC else np.sqrt(self.eps)


@dataclass
class Trajectory:
    times: np.ndarray
    snapshots: list = field(repr=False)
    status: str = "completed"

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    @property
    def final(self):
        return self.snapshots[-1]


def _phi1(z: np.ndarray) -> np.ndarray:
    """(e^z - 1)/z, stable near 0."""
    small = np.abs(z) < 1e-8
    return np.where(small, 1.0 + 0.5 * z,
                    np.expm1(np.where(small, 1.0, z)) / np.where(small, 1.0, z))


class SHStepper:
    """Precomputed ETD1 step for one (grid, params, intensity) combination."""

    def __init__(self, grid: Grid, p: ModelParams, intensity: float = 1.0):
        if abs(grid.eps - p.eps) > 1e-9 * p.eps:
            raise ValueError("grid carrier does not match params.eps")
        self.grid = grid
        self.p = p
        lam = symbol_L_eps(grid.rfft_wavenumbers, p.eps)
        self.decay = np.exp(lam * p.dt)
        self.phi1dt = p.dt * _phi1(lam * p.dt)
        self.noise = SpectralNoise(grid, intensity)
        self.noise_scale = (self.noise.ou_scale(lam, p.dt)
                            if intensity > 0 else None)
        if p.variant == CUBIC:
            self.exponents, self.pad = (2, 3), 2
        else:
            self.exponents, self.pad = (2, 3, 5), 3

    def nonlinearity(self, vspec: np.ndarray) -> np.ndarray:
        pw = dealiased_powers(vspec, self.grid.n_points, self.exponents, self.pad)
        p = self.p
        if p.variant == CUBIC:
            return (p.nu / p.eps) * pw[2] - pw[3]
        return (p.nu2 / p.eps) * pw[2] + p.nu3 * pw[3] - pw[5]

    def step_spec(self, vspec: np.ndarray, xi: np.ndarray | None) -> np.ndarray:
        out = self.decay * vspec + self.phi1dt * self.nonlinearity(vspec)
        if xi is not None:
            out = out + xi
        return out

    def noise_increment(self, rng: np.random.Generator) -> np.ndarray | None:
        if self.noise_scale is None:
            return None
        return self.noise.raw(rng) * self.noise_scale


def step_rescaled(v: RealField, p: ModelParams, rng: np.random.Generator | None = None,
                  intensity: float = 1.0) -> RealField:
    """One exponential-Euler step; raises BlowupStopped past the guard."""
    if v.sup_norm() >= p.blowup_threshold:
        raise BlowupStopped("pre-step sup norm exceeds blow-up threshold")
    stepper = SHStepper(v.grid, p, intensity if rng is not None else 0.0)
    xi = stepper.noise_increment(rng) if rng is not None else None
    out = RealField.from_spectrum(v.grid, stepper.step_spec(v.spectrum(), xi))
    if not np.isfinite(out.values).all() or out.sup_norm() >= p.blowup_threshold:
        raise BlowupStopped("post-step sup norm exceeds blow-up threshold")
    return out


def simulate(v0: RealField, p: ModelParams, cfg: NoiseConfig | None = None,
             snapshot_stride: int = 10) -> Trajectory:
    """Integrate to t_end (or blow-up); snapshots every ``snapshot_stride`` steps."""
    grid = v0.grid
    intensity = cfg.intensity if cfg is not None else 0.0
    stepper = SHStepper(grid, p, intensity)
    rng = cfg.make_rng() if cfg is not None and intensity > 0 else None
    n_steps = int(round(p.t_end / p.dt))
    times = [0.0]
    snaps = [v0]
    vspec = v0.spectrum()
    status = "completed"
    for i in range(1, n_steps + 1):
        xi = stepper.noise_increment(rng) if rng is not None else None
        vspec = stepper.step_spec(vspec, xi)
        vals = np.fft.irfft(vspec, n=grid.n_points)
        if not np.isfinite(vals).all() or np.max(np.abs(vals)) >= p.blowup_threshold:
            status = "blowup_stopped"
            break
        if i % snapshot_stride == 0 or i == n_steps:
            times.append(i * p.dt)
            snaps.append(RealField(grid, vals))
    return Trajectory(times=np.asarray(times), snapshots=snaps, status=status)


def rescale_to_original(traj: Trajectory, eps: float,
                        variant: str = CUBIC) -> Trajectory:
    """Map the rescaled trajectory v(T, X) back to u(t, x).

    u = scale * v with scale eps (cubic) or sqrt(eps) (quintic); t = T/eps^2
    and the domain length stretches by 1/eps (carrier returns to wavenumber 1).
    """
    scale = eps if variant == CUBIC else np.sqrt(eps)
    g0 = traj.snapshots[0].grid
    grid = Grid(n_points=g0.n_points, length=g0.length / eps,
                carrier_index=g0.carrier_index)
    snaps = [RealField(grid, scale * s.values) for s in traj.snapshots]
    return Trajectory(times=traj.times / eps ** 2, snapshots=snaps,
                      status=traj.status)


def rescale_from_original(traj: Trajectory, eps: float,
                          variant: str = CUBIC) -> Trajectory:
    """Inverse of rescale_to_original."""
    scale = eps if variant == CUBIC else np.sqrt(eps)
    g0 = traj.snapshots[0].grid
    grid = Grid(n_points=g0.n_points, length=g0.length * eps,
                carrier_index=g0.carrier_index)
    snaps = [RealField(grid, s.values / scale) for s in traj.snapshots]
    return Trajectory(times=traj.times * eps ** 2, snapshots=snaps,
                      status=traj.status)


def modulated_carrier_ic(grid: Grid, eps: float, rng: np.random.Generator,
                         amplitude: float = 1.0, delta: float = DEFAULT_DELTA,
                         offband: float = 0.0, n_profile_modes: int = 8) -> RealField:
    """Initial data A0(X) e^{iX/eps} + c.c. with a random band-limited profile.

    The profile uses the lowest ``n_profile_modes`` amplitude wavenumbers with
    Gaussian coefficients and a 1/(1+j) rolloff, normalized to sup |A0| =
    ``amplitude``.  ``offband`` adds a smooth perturbation supported outside
    the P1 band (scaled to that sup norm).
    """
    from .grid import ComplexField

    n = grid.n_points
    spec = np.zeros(n, dtype=np.complex128)
    for j in range(-n_profile_modes, n_profile_modes + 1):
        c = (rng.standard_normal() + 1j * rng.standard_normal()) / (1.0 + abs(j))
        spec[j % n] = c * n / (2 * n_profile_modes + 1)
    A0 = ComplexField.from_spectrum(grid, spec)
    peak = A0.sup_norm()
    if peak > 0:
        A0 = A0 * (amplitude / peak)
    v0 = modulate(A0, eps)
    if offband > 0:
        # smooth off-band bump: a few low-|K| modes (P0 region complement of P1)
        pert = np.zeros(n, dtype=np.complex128)
        for j in range(1, 5):
            c = rng.standard_normal() + 1j * rng.standard_normal()
            pert[j] = c * n / 8.0
            pert[-j] = np.conj(c) * n / 8.0
        w = np.real(np.fft.ifft(pert))
        m = np.max(np.abs(w))
        if m > 0:
            v0 = RealField(grid, v0.values + offband * w / m)
    return v0
