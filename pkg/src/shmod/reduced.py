"""The averaged band equation for w and the limiting stochastic
Ginzburg-Landau amplitude equation.

Band equation (cubic case):
    dw/dT = L_eps w - 2 nu^2 P1[w * inv (P0+P2) w^2] - P1 w^3 + dW1/dT
where inv is eps^-2 L_eps^-1 (a bounded multiplier on the P0/P2 bands) and
W1 = P1 W.  The quintic case replaces the polynomial part by
+ nu3 P1 w^3 - P1 w^5 with the same quadratic correction (nu2 in place of nu).

Amplitude equation:
    dA/dT = 4 A_XX + cubic * |A|^2 A + quintic * |A|^4 A + eta
with cubic = -(3 - 38/9 nu^2) (cubic case) or +(3 nu3 + 38/9 nu2^2) and
quintic = -10 (quintic case).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bands import DEFAULT_DELTA, make_kernel
from .grid import ComplexField, Grid, RealField
from .noise import NoiseConfig, SpectralNoise, ou_increment_variance
from .operators import (dealiased_powers, dealiased_powers_complex,
                        dealiased_product, inv_symbol_scaled, symbol_L_eps,
                        NEAR_SINGULAR_TOL)
from .sh import (BlowupStopped, CUBIC, QUINTIC, ModelParams, SHStepper,
                 Trajectory, _phi1)

GL_DIFFUSION = 4.0
GL_QUINTIC = -10.0


@dataclass(frozen=True)
class GLCoefficients:
    cubic: float
    quintic: float = 0.0
    diffusion: float = GL_DIFFUSION
    noise_intensity: float = 1.0

    def __post_init__(self):
        if self.diffusion != GL_DIFFUSION:
            raise ValueError("the amplitude equation has diffusion constant 4")


def gl_coefficients(nu: float, noise_intensity: float = 1.0) -> GLCoefficients:
    """Cubic-case amplitude coefficients: multiplier of |A|^2 A is -(3 - 38/9 nu^2)."""
    return GLCoefficients(cubic=-(3.0 - 38.0 / 9.0 * nu ** 2),
                          quintic=0.0, noise_intensity=noise_intensity)


def gl5_coefficients(nu2: float, nu3: float,
                     noise_intensity: float = 1.0) -> GLCoefficients:
    """Quintic-case coefficients: +(3 nu3 + 38/9 nu2^2) |A|^2 A - 10 |A|^4 A."""
    return GLCoefficients(cubic=3.0 * nu3 + 38.0 / 9.0 * nu2 ** 2,
                          quintic=GL_QUINTIC, noise_intensity=noise_intensity)


# -- reduced band equation ---------------------------------------------------

class ReducedStepper:
    """ETD1 step of the averaged band equation, sharing the SH noise layout."""

    def __init__(self, grid: Grid, p: ModelParams, intensity: float = 1.0,
                 delta: float = DEFAULT_DELTA):
        if abs(grid.eps - p.eps) > 1e-9 * p.eps:
            raise ValueError("grid carrier does not match params.eps")
        self.grid = grid
        self.p = p
        self.delta = delta
        K = grid.rfft_wavenumbers
        lam = symbol_L_eps(K, p.eps)
        self.decay = np.exp(lam * p.dt)
        self.phi1dt = p.dt * _phi1(lam * p.dt)
        self.q1 = make_kernel("P1", delta, p.eps, grid).evaluate(K)
        q0 = make_kernel("P0", delta, p.eps, grid).evaluate(K)
        q2 = make_kernel("P2", delta, p.eps, grid).evaluate(K)
        q02 = q0 + q2
        on = q02 > 0
        denom = np.abs(1.0 - (p.eps * K) ** 2)
        if np.any(denom[on] < NEAR_SINGULAR_TOL):
            raise ValueError("near-singular band inverse: delta too large")
        self.inv02 = np.zeros_like(K)
        self.inv02[on] = q02[on] * inv_symbol_scaled(K[on], p.eps)
        self.noise = SpectralNoise(grid, intensity)
        self.noise_scale = (self.noise.ou_scale(lam, p.dt) * self.q1
                            if intensity > 0 else None)
        self.pad = 2 if p.variant == CUBIC else 3

    def quadratic_correction(self, wspec: np.ndarray) -> np.ndarray:
        """Half-spectrum of -2 nu^2 P1[w * eps^-2 L_eps^-1 (P0+P2) w^2]."""
        p = self.p
        nu_q = p.nu if p.variant == CUBIC else p.nu2
        if nu_q == 0.0:
            return np.zeros_like(wspec)
        w2 = dealiased_product(wspec, wspec, self.grid.n_points, 2)
        mix = dealiased_product(wspec, self.inv02 * w2, self.grid.n_points, 2)
        return -2.0 * nu_q ** 2 * self.q1 * mix

    def drift(self, wspec: np.ndarray) -> np.ndarray:
        p = self.p
        n = self.grid.n_points
        out = self.quadratic_correction(wspec)
        if p.variant == CUBIC:
            pw = dealiased_powers(wspec, n, (3,), 2)
            out = out - self.q1 * pw[3]
        else:
            pw = dealiased_powers(wspec, n, (3, 5), 3)
            out = out + p.nu3 * self.q1 * pw[3] - self.q1 * pw[5]
        return out

    def step_spec(self, wspec: np.ndarray, raw: np.ndarray | None) -> np.ndarray:
        out = self.decay * wspec + self.phi1dt * self.drift(wspec)
        if raw is not None and self.noise_scale is not None:
            out = out + raw * self.noise_scale
        return out


def reduced_quadratic_correction(w: RealField, eps: float, nu: float,
                                 delta: float = DEFAULT_DELTA) -> RealField:
    """The averaged quadratic term as a field (diagnostic surface)."""
    p = ModelParams(variant=CUBIC, eps=eps, nu=nu)
    stepper = ReducedStepper(w.grid, p, intensity=0.0, delta=delta)
    return RealField.from_spectrum(w.grid, stepper.quadratic_correction(w.spectrum()))


def _one_reduced_step(w: RealField, p: ModelParams, rng, intensity, delta) -> RealField:
    if w.sup_norm() >= p.blowup_threshold:
        raise BlowupStopped("pre-step sup norm exceeds blow-up threshold")
    stepper = ReducedStepper(w.grid, p, intensity if rng is not None else 0.0,
                             delta)
    raw = stepper.noise.raw(rng) if rng is not None and intensity > 0 else None
    out = RealField.from_spectrum(w.grid, stepper.step_spec(w.spectrum(), raw))
    if not np.isfinite(out.values).all() or out.sup_norm() >= p.blowup_threshold:
        raise BlowupStopped("post-step sup norm exceeds blow-up threshold")
    return out


def step_reduced(w: RealField, eps: float, nu: float, dt: float,
                 rng: np.random.Generator | None = None, intensity: float = 1.0,
                 delta: float = DEFAULT_DELTA,
                 blowup_threshold: float = 1e4) -> RealField:
    """One ETD1 step of the cubic-case band equation (P1-band noise)."""
    p = ModelParams(variant=CUBIC, eps=eps, nu=nu, dt=dt,
                    blowup_threshold=blowup_threshold)
    return _one_reduced_step(w, p, rng, intensity, delta)


def quintic_reduced_step(w: RealField, eps: float, nu2: float, nu3: float,
                         dt: float, rng: np.random.Generator | None = None,
                         intensity: float = 1.0, delta: float = DEFAULT_DELTA,
                         blowup_threshold: float = 1e4) -> RealField:
    """One ETD1 step of the quintic-case band equation."""
    p = ModelParams(variant=QUINTIC, eps=eps, nu2=nu2, nu3=nu3, dt=dt,
                    blowup_threshold=blowup_threshold)
    return _one_reduced_step(w, p, rng, intensity, delta)


def simulate_reduced(w0: RealField, p: ModelParams, cfg: NoiseConfig | None = None,
                     delta: float = DEFAULT_DELTA,
                     snapshot_stride: int = 10) -> Trajectory:
    intensity = cfg.intensity if cfg is not None else 0.0
    stepper = ReducedStepper(w0.grid, p, intensity, delta)
    rng = cfg.make_rng() if cfg is not None and intensity > 0 else None
    n_steps = int(round(p.t_end / p.dt))
    times, snaps = [0.0], [w0]
    wspec = w0.spectrum()
    status = "completed"
    for i in range(1, n_steps + 1):
        raw = stepper.noise.raw(rng) if rng is not None else None
        wspec = stepper.step_spec(wspec, raw)
        vals = np.fft.irfft(wspec, n=w0.grid.n_points)
        if not np.isfinite(vals).all() or np.max(np.abs(vals)) >= p.blowup_threshold:
            status = "blowup_stopped"
            break
        if i % snapshot_stride == 0 or i == n_steps:
            times.append(i * p.dt)
            snaps.append(RealField(w0.grid, vals))
    return Trajectory(times=np.asarray(times), snapshots=snaps, status=status)


# -- Ginzburg-Landau solver --------------------------------------------------

class GLStepper:
    """ETD2RK step of the amplitude equation on a periodic grid.

    Second order on the deterministic part (the Riccati oracle needs it);
    noise is an exact per-mode OU increment added after the deterministic
    update.
    """

    def __init__(self, grid: Grid, c: GLCoefficients, dt: float):
        self.grid = grid
        self.c = c
        self.dt = dt
        K = grid.wavenumbers
        lam = -c.diffusion * K ** 2
        self.lam = lam
        self.decay = np.exp(lam * dt)
        z = lam * dt
        self.phi1dt = dt * _phi1(z)
        small = np.abs(z) < 1e-6
        zs = np.where(small, 1.0, z)
        phi2 = np.where(small, 0.5 + z / 6.0, (np.expm1(zs) - zs) / zs ** 2)
        self.phi2dt = dt * phi2
        self.unit = c.noise_intensity ** 2 * grid.n_points ** 2 / grid.length
        self.noise_scale = np.sqrt(
            self.unit * ou_increment_variance(lam, dt) / grid.n_points)
        self.exponents = (3,) if c.quintic == 0.0 else (3, 5)
        self.pad = 2 if c.quintic == 0.0 else 3

    def nonlinearity(self, aspec: np.ndarray) -> np.ndarray:
        pw = dealiased_powers_complex(aspec, self.grid.n_points,
                                      self.exponents, self.pad)
        out = self.c.cubic * pw[3]
        if self.c.quintic != 0.0:
            out = out + self.c.quintic * pw[5]
        return out

    def step_spec(self, aspec: np.ndarray, xi: np.ndarray | None) -> np.ndarray:
        n1 = self.nonlinearity(aspec)
        a1 = self.decay * aspec + self.phi1dt * n1
        out = a1 + self.phi2dt * (self.nonlinearity(a1) - n1)
        if xi is not None:
            out = out + xi
        return out

    def noise_increment(self, rng: np.random.Generator) -> np.ndarray:
        z = (rng.standard_normal(self.grid.n_points)
             + 1j * rng.standard_normal(self.grid.n_points)) / np.sqrt(2.0)
        return np.fft.fft(z) * self.noise_scale


def step_gl(A: ComplexField, c: GLCoefficients, dt: float,
            rng: np.random.Generator | None = None,
            blowup_threshold: float = 1e4) -> ComplexField:
    """One amplitude-equation step; raises BlowupStopped past the guard."""
    if A.sup_norm() >= blowup_threshold:
        raise BlowupStopped("pre-step sup norm exceeds blow-up threshold")
    stepper = GLStepper(A.grid, c, dt)
    xi = (stepper.noise_increment(rng)
          if rng is not None and c.noise_intensity > 0 else None)
    out = ComplexField.from_spectrum(A.grid, stepper.step_spec(A.spectrum(), xi))
    if not np.isfinite(out.values).all() or out.sup_norm() >= blowup_threshold:
        raise BlowupStopped("post-step sup norm exceeds blow-up threshold")
    return out


@dataclass
class GLTrajectory:
    times: np.ndarray
    snapshots: list = field(repr=False)
    status: str = "completed"

    @property
    def final(self):
        return self.snapshots[-1]


def simulate_gl(A0: ComplexField, c: GLCoefficients, dt: float, t_end: float,
                cfg: NoiseConfig | None = None, snapshot_stride: int = 10,
                blowup_threshold: float = 1e4) -> GLTrajectory:
    stepper = GLStepper(A0.grid, c, dt)
    rng = (cfg.make_rng() if cfg is not None and c.noise_intensity > 0 else None)
    n_steps = int(round(t_end / dt))
    times, snaps = [0.0], [A0]
    aspec = A0.spectrum()
    status = "completed"
    for i in range(1, n_steps + 1):
        xi = stepper.noise_increment(rng) if rng is not None else None
        aspec = stepper.step_spec(aspec, xi)
        vals = np.fft.ifft(aspec)
        if not np.isfinite(vals).all() or np.max(np.abs(vals)) >= blowup_threshold:
            status = "blowup_stopped"
            break
        if i % snapshot_stride == 0 or i == n_steps:
            times.append(i * dt)
            snaps.append(ComplexField(A0.grid, vals))
    return GLTrajectory(times=np.asarray(times), snapshots=snaps, status=status)


# -- paired runs for the approximation studies -------------------------------

@dataclass
class PairedResult:
    traj_v: Trajectory
    traj_w: Trajectory
    sup_diff: float                      # sup_T ||P1 v - w||_inf
    sup_diff_gl: float | None = None     # sup_T ||demod(w) - A||_inf
    status: str = "completed"


def _full_from_half(rspec: np.ndarray, n: int) -> np.ndarray:
    """Hermitian extension of an rfft half-spectrum to the full fft layout."""
    full = np.empty(n, dtype=np.complex128)
    full[: n // 2 + 1] = rspec
    full[n // 2 + 1:] = np.conj(rspec[1: n // 2][::-1])
    return full


def _demod_spec(rspec: np.ndarray, grid: Grid, pos_mask: np.ndarray) -> np.ndarray:
    """Demodulated amplitude spectrum from an rfft half-spectrum."""
    full = _full_from_half(rspec, grid.n_points)
    return np.roll(full * pos_mask, -grid.carrier_index)


def simulate_paired(v0: RealField, p: ModelParams, cfg: NoiseConfig,
                    delta: float = DEFAULT_DELTA, snapshot_stride: int = 10,
                    with_gl: bool = False) -> PairedResult:
    """Drive the full equation and the band equation with one noise path.

    w starts from P1 v0.  If ``with_gl`` is set, a Ginzburg-Landau amplitude
    on the same grid is driven by the demodulated P1 noise band (same white
    realization, each mode with its own exact OU variance) and compared
    against the demodulated w.
    """
    grid = v0.grid
    n = grid.n_points
    sh = SHStepper(grid, p, cfg.intensity)
    red = ReducedStepper(grid, p, cfg.intensity, delta)
    rng = cfg.make_rng()
    vspec = v0.spectrum()
    wspec = red.q1 * vspec
    gl = None
    if with_gl:
        c = (gl_coefficients(p.nu, cfg.intensity) if p.variant == CUBIC
             else gl5_coefficients(p.nu2, p.nu3, cfg.intensity))
        gl = GLStepper(grid, c, p.dt)
        q1_signed = make_kernel("P1", delta, p.eps, grid).evaluate(grid.wavenumbers)
        pos_mask = np.where(grid.wavenumbers > 0, q1_signed, 0.0)
        band_mask = np.roll(pos_mask, -grid.carrier_index)
        gl_scale = np.sqrt(gl.unit * ou_increment_variance(gl.lam, p.dt) / n)
        aspec = _demod_spec(vspec, grid, pos_mask)
    n_steps = int(round(p.t_end / p.dt))
    times, snaps_v, snaps_w = [0.0], [v0], [RealField.from_spectrum(grid, wspec)]
    sup_diff = 0.0
    sup_diff_gl = 0.0
    status = "completed"
    for i in range(1, n_steps + 1):
        g = rng.standard_normal(n)
        graw = np.fft.rfft(g)
        xi_sh = graw * sh.noise_scale if sh.noise_scale is not None else None
        vspec = sh.step_spec(vspec, xi_sh)
        wspec = red.step_spec(wspec, graw)
        if gl is not None:
            xi_gl = (np.roll(_full_from_half(graw, n), -grid.carrier_index)
                     * band_mask * gl_scale)
            aspec = gl.step_spec(aspec, xi_gl)
        v_vals = np.fft.irfft(vspec, n=n)
        w_vals = np.fft.irfft(wspec, n=n)
        if (not np.isfinite(v_vals).all()
                or np.max(np.abs(v_vals)) >= p.blowup_threshold
                or np.max(np.abs(w_vals)) >= p.blowup_threshold):
            status = "blowup_stopped"
            break
        p1v = np.fft.irfft(red.q1 * vspec, n=n)
        sup_diff = max(sup_diff, float(np.max(np.abs(p1v - w_vals))))
        if gl is not None:
            a_w = np.fft.ifft(_demod_spec(wspec, grid, pos_mask))
            a_gl = np.fft.ifft(aspec)
            sup_diff_gl = max(sup_diff_gl, float(np.max(np.abs(a_w - a_gl))))
        if i % snapshot_stride == 0 or i == n_steps:
            times.append(i * p.dt)
            snaps_v.append(RealField(grid, v_vals))
            snaps_w.append(RealField(grid, w_vals))
    traj_v = Trajectory(times=np.asarray(times), snapshots=snaps_v, status=status)
    traj_w = Trajectory(times=np.asarray(times), snapshots=snaps_w, status=status)
    return PairedResult(traj_v=traj_v, traj_w=traj_w, sup_diff=sup_diff,
                        sup_diff_gl=(sup_diff_gl if with_gl else None),
                        status=status)
