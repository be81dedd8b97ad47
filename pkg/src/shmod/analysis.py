"""Diagnostics: weighted Hoelder norms, averaging-identity residuals,
mode-concentration ratios, trajectory errors, scaling-exponent fits, and
effective amplitude-coefficient estimation.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .bands import DEFAULT_DELTA, demodulate, make_kernel, project
from .grid import ComplexField, Grid, RealField

from .operators import inv_symbol_scaled
from .sh import CUBIC, QUINTIC, ModelParams, Trajectory, simulate


@dataclass(frozen=True)
class HolderNormConfig:
    alpha: float = 0.4
    kappa: float = 0.1
    window_radii: tuple[float, ...] = ()
    pair_stride: int = 16

    def __post_init__(self):
        if not (0 < self.alpha < 0.5):
            raise ValueError("alpha must lie in (0, 1/2)")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.pair_stride < 1:
            raise ValueError("pair_stride must be at least 1")

    def radii_for(self, grid: Grid) -> np.ndarray:
        if self.window_radii:
            radii = np.asarray(self.window_radii, dtype=np.float64)
        else:
            # dyadic ladder 2, 4, ... up to half the domain
            l_max = grid.length / 2.0
            radii = 2.0 ** np.arange(1, max(2, int(np.floor(np.log2(l_max))) + 1))
            radii = radii[radii <= l_max]
            if radii.size == 0:
                radii = np.array([min(2.0, l_max)])
        if np.any(radii <= 1.0) or np.any(radii > grid.length / 2.0 + 1e-12):
            raise ValueError("window radii must lie in (1, length/2]")
        return radii


def weighted_holder_norm(f: RealField | ComplexField,
                         cfg: HolderNormConfig = HolderNormConfig()) -> float:
    """Discrete weighted Hoelder norm:
    max over window radii L of L^-kappa * (sup_{|x|<=L} |f|
    + max over grid pairs within pair_stride of |f(x)-f(y)| / |x-y|^alpha),
    with the domain recentered so x=0 is the grid midpoint.
    """
    grid = f.grid
    x = grid.x_centered
    vals = f.values
    radii = cfg.radii_for(grid)
    out = 0.0
    # precompute stride quotients once; window masks select pairs inside [-L, L]
    quotients = []
    for s in range(1, cfg.pair_stride + 1):
        dv = np.abs(vals[s:] - vals[:-s]) / (s * grid.dx) ** cfg.alpha
        quotients.append(dv)
    for L in radii:
        inside = np.abs(x) <= L
        sup = float(np.max(np.abs(vals[inside]))) if np.any(inside) else 0.0
        semi = 0.0
        for s, dv in enumerate(quotients, start=1):
            pair_in = inside[:-s] & inside[s:]
            if np.any(pair_in):
                semi = max(semi, float(np.max(dv[pair_in])))
        out = max(out, L ** (-cfg.kappa) * (sup + semi))
    return out


def mode_concentration(f: RealField, eps: float,
                       delta: float = DEFAULT_DELTA) -> float:
    """||(I - P1) f||_2 / ||f||_2; 0 means fully band-concentrated."""
    total = f.l2_norm()
    if total == 0.0:
        warnings.warn("mode_concentration of the zero field; returning 0")
        return 0.0
    q1 = make_kernel("P1", delta, eps, f.grid).evaluate(f.grid.rfft_wavenumbers)
    off = RealField.from_spectrum(f.grid, f.spectrum() * (1.0 - q1))
    return off.l2_norm() / total


def averaging_residual(traj: Trajectory, eps: float, nu: float, k_band: str,
                       delta: float = DEFAULT_DELTA,
                       stride_check: bool = True) -> float:
    """Residual of the averaging identity for the chosen band (P0 or P2):

        int_0^T v1 * v_k dT + nu * int_0^T v1 * eps^-2 L_eps^-1 P_k v1^2 dT

    evaluated pointwise on the grid by the trapezoid rule over snapshots;
    returns the sup norm of the sum at the final snapshot time.
    """
    if k_band not in ("P0", "P2"):
        raise ValueError("k_band must be 'P0' or 'P2'")
    grid = traj.snapshots[0].grid
    K = grid.rfft_wavenumbers
    q1 = make_kernel("P1", delta, eps, grid).evaluate(K)
    qk = make_kernel(k_band, delta, eps, grid).evaluate(K)
    on = qk > 0
    inv = np.zeros_like(K)
    inv[on] = qk[on] * inv_symbol_scaled(K[on], eps)

    def integrand(snap: RealField) -> np.ndarray:
        spec = snap.spectrum()
        v1 = np.fft.irfft(q1 * spec, n=grid.n_points)
        vk = np.fft.irfft(qk * spec, n=grid.n_points) / eps
        v1sq_spec = np.fft.rfft(v1 * v1)
        corr = np.fft.irfft(inv * v1sq_spec, n=grid.n_points)
        return v1 * vk + nu * v1 * corr

    times = np.asarray(traj.times)
    fields = np.stack([integrand(s) for s in traj.snapshots])
    total = np.trapezoid(fields, x=times, axis=0)
    if stride_check and len(times) >= 5:
        coarse = np.trapezoid(fields[::2], x=times[::2], axis=0)
        num = float(np.max(np.abs(total - coarse)))
        den = float(np.max(np.abs(total)))
        if den > 0 and num / den > 0.10:
            warnings.warn("averaging_residual: snapshot stride too coarse "
                          "(integral changes >10% under stride halving)")
    return float(np.max(np.abs(total)))


def approximation_error(a: Trajectory, b: Trajectory, norm: str = "sup",
                        holder_cfg: HolderNormConfig | None = None) -> float:
    """Sup over shared times of the chosen norm of the trajectory difference."""
    ga, gb = a.snapshots[0].grid, b.snapshots[0].grid
    if (ga.n_points, ga.length) != (gb.n_points, gb.length):
        raise ValueError("trajectory grids do not match")
    ta, tb = np.asarray(a.times), np.asarray(b.times)
    if ta.shape != tb.shape or not np.allclose(ta, tb):
        raise ValueError("trajectory time stamps do not match")
    worst = 0.0
    for sa, sb in zip(a.snapshots, b.snapshots):
        diff = RealField(ga, sa.values - sb.values)
        if norm == "sup":
            worst = max(worst, diff.sup_norm())
        elif norm == "L2":
            worst = max(worst, diff.l2_norm())
        elif norm == "holder":
            worst = max(worst, weighted_holder_norm(
                diff, holder_cfg or HolderNormConfig()))
        else:
            raise ValueError(f"unknown norm {norm!r}")
    return worst


@dataclass(frozen=True)
class ScalingStudy:
    eps_values: tuple[float, ...]
    quantiles: tuple[float, ...]
    slope: float
    intercept: float
    residuals: tuple[float, ...]


def fit_scaling_exponent(pairs) -> ScalingStudy:
    """Least-squares slope of log(diagnostic) against log(eps)."""
    pairs = [(float(e), float(y)) for e, y in pairs]
    if len(pairs) < 3:
        raise ValueError("need at least 3 (eps, diagnostic) points")
    if any(e <= 0 or y <= 0 for e, y in pairs):
        raise ValueError("eps and diagnostics must be positive")
    le = np.log([e for e, _ in pairs])
    ly = np.log([y for _, y in pairs])
    slope, intercept = np.polyfit(le, ly, 1)
    resid = ly - (slope * le + intercept)
    return ScalingStudy(eps_values=tuple(e for e, _ in pairs),
                        quantiles=tuple(y for _, y in pairs),
                        slope=float(slope), intercept=float(intercept),
                        residuals=tuple(float(r) for r in resid))


# -- effective amplitude-coefficient estimation ------------------------------

@dataclass(frozen=True)
class LandauFit:
    c3: float
    c5: float
    r_squared: float
    amplitudes: tuple[float, ...] = field(repr=False, default=())
    rates: tuple[float, ...] = field(repr=False, default=())


def estimate_landau_coefficient(eps: float, nu=0.0, variant: str = CUBIC,
                                amplitude: float = 0.3, n_points: int = 8192,
                                dt: float = 1e-3, delta: float = DEFAULT_DELTA,
                                fit_window: float | None = None,
                                fit_quintic: bool | None = None,
                                r2_min: float = 0.99) -> LandauFit:
    """Fit the effective amplitude nonlinearity of the deterministic equation.

    Runs the full (noise-free) dynamics from a pure carrier 2*a0*cos(x/eps),
    demodulates, and regresses da/dT on a^3 (and a^5 for the quintic variant).
    The fit starts after the slaved-mode transient (10 eps^2) and rejects
    windows with R^2 below ``r2_min``.
    """
    if not (0.1 <= amplitude <= 0.5):
        raise ValueError("carrier amplitude must lie in [0.1, 0.5]")
    if variant == CUBIC:
        nu_val, nu2, nu3 = float(nu), 0.0, 0.0
    elif variant == QUINTIC:
        nu2, nu3 = (float(nu[0]), float(nu[1]))
        nu_val = 0.0
    else:
        raise ValueError(f"unknown variant {variant!r}")
    if fit_quintic is None:
        fit_quintic = variant == QUINTIC

    t_skip = 10.0 * eps ** 2
    if fit_window is None:
        fit_window = 0.1 / amplitude ** 2
    t_end = t_skip + fit_window

    grid = Grid.for_carrier(eps, n_points=n_points)
    v0 = RealField(grid, 2.0 * amplitude * np.cos(grid.x / eps))
    p = ModelParams(variant=variant, eps=eps, nu=nu_val, nu2=nu2, nu3=nu3,
                    dt=dt, t_end=t_end)
    stride = max(1, int(round(t_end / dt)) // 400)
    traj = simulate(v0, p, cfg=None, snapshot_stride=stride)
    if traj.status != "completed":
        raise RuntimeError("deterministic run hit the blow-up guard")

    times = np.asarray(traj.times)
    amps = []
    for snap in traj.snapshots:
        v1 = project(snap, make_kernel("P1", delta, eps, grid))
        A = demodulate(v1, eps, delta)
        amps.append(float(np.mean(np.abs(A.values))))
    amps = np.asarray(amps)

    keep = times >= t_skip
    t, a = times[keep], amps[keep]
    if t.size < 8:
        raise RuntimeError("not enough samples in the fit window")
    rate = np.gradient(a, t)
    # drop the window edges where np.gradient is one-sided
    t, a, rate = t[1:-1], a[1:-1], rate[1:-1]

    if fit_quintic and variant == QUINTIC and (nu2 != 0.0 or nu3 != 0.0):
        X = np.column_stack([a ** 3, a ** 5])
    elif fit_quintic:
        X = np.column_stack([a ** 5])
    else:
        X = np.column_stack([a ** 3])
    coef, *_ = np.linalg.lstsq(X, rate, rcond=None)
    pred = X @ coef
    ss_res = float(np.sum((rate - pred) ** 2))
    ss_tot = float(np.sum((rate - np.mean(rate)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    if r2 < r2_min:
        raise RuntimeError(f"amplitude fit rejected: R^2 = {r2:.4f} < {r2_min}")
    if fit_quintic and X.shape[1] == 2:
        c3, c5 = float(coef[0]), float(coef[1])
    elif fit_quintic:
        c3, c5 = 0.0, float(coef[0])
    else:
        c3, c5 = float(coef[0]), 0.0
    return LandauFit(c3=c3, c5=c5, r_squared=r2,
                     amplitudes=tuple(a), rates=tuple(rate))
