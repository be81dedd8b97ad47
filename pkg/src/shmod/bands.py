"""Smooth Fourier band projectors P0, P1, P2, the four-part field
decomposition, and carrier (de)modulation between the band field and the
complex amplitude.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import ComplexField, Grid, RealField

DEFAULT_DELTA = 0.25

_BAND_SPEC = {
    # which -> (centers in units of 1/eps, plateau radius in units of delta/eps)
    "P0": ((0.0,), 2.0),
    "P1": ((-1.0, 1.0), 1.0),
    "P2": ((-2.0, 2.0), 2.0),
}


@dataclass(frozen=True)
class BandKernel:
    """Smooth multiplier q(K): 1 on a plateau around each center, raised-cosine
    taper to 0 over unit width, symmetric under K -> -K."""

    which: str
    centers: tuple[float, ...]
    plateau_radius: float
    taper_width: float = 1.0

    def evaluate(self, K) -> np.ndarray:
        K = np.asarray(K, dtype=np.float64)
        dist = np.min(np.abs(K[..., None] - np.asarray(self.centers)), axis=-1)
        s = (dist - self.plateau_radius) / self.taper_width
        q = np.where(s <= 0.0, 1.0,
                     np.where(s >= 1.0, 0.0, 0.5 * (1.0 + np.cos(np.pi * np.clip(s, 0.0, 1.0)))))
        return q

    @property
    def support_radius(self) -> float:
        return self.plateau_radius + self.taper_width


def make_kernel(which: str, delta: float, eps: float, grid: Grid) -> BandKernel:
    """Build the P0/P1/P2 kernel for the given delta and eps on a grid."""
    if which not in _BAND_SPEC:
        raise ValueError(f"unknown band {which!r}")
    if not (0 < delta <= 0.5):
        raise ValueError("delta must lie in (0, 1/2]")
    centers_rel, radius_rel = _BAND_SPEC[which]
    centers = tuple(c / eps for c in centers_rel)
    kernel = BandKernel(which=which, centers=centers,
                        plateau_radius=radius_rel * delta / eps)
    outer = max(abs(c) for c in centers) + kernel.support_radius
    if outer >= grid.nyquist:
        raise ValueError("band support reaches past the grid Nyquist")
    # P1 and P2 supports must stay disjoint (needed for the projector algebra)
    p1_hi = 1.0 / eps + delta / eps + 1.0
    p2_lo = 2.0 / eps - 2.0 * delta / eps - 1.0
    if which in ("P1", "P2") and p1_hi >= p2_lo:
        raise ValueError("delta too large: P1 and P2 supports overlap")
    return kernel


def project(f: RealField, kernel: BandKernel) -> RealField:
    return RealField.from_spectrum(
        f.grid, f.spectrum() * kernel.evaluate(f.grid.rfft_wavenumbers))


def project_complement(f: RealField, kernel: BandKernel) -> RealField:
    """(I - P) f."""
    return RealField.from_spectrum(
        f.grid, f.spectrum() * (1.0 - kernel.evaluate(f.grid.rfft_wavenumbers)))


@dataclass(frozen=True)
class AnsatzDecomposition:
    """v = v1 + eps*v0 + eps*v2 + eps*remainder (exact by construction)."""

    v1: RealField
    v0: RealField
    v2: RealField
    remainder: RealField
    eps: float

    def reconstruct(self) -> RealField:
        return RealField(
            self.v1.grid,
            self.v1.values + self.eps * (self.v0.values + self.v2.values
                                         + self.remainder.values))


def decompose(v: RealField, eps: float, delta: float = DEFAULT_DELTA) -> AnsatzDecomposition:
    grid = v.grid
    spec = v.spectrum()
    K = grid.rfft_wavenumbers
    q0 = make_kernel("P0", delta, eps, grid).evaluate(K)
    q1 = make_kernel("P1", delta, eps, grid).evaluate(K)
    q2 = make_kernel("P2", delta, eps, grid).evaluate(K)
    v1 = RealField.from_spectrum(grid, spec * q1)
    v0 = RealField.from_spectrum(grid, spec * q0 / eps)
    v2 = RealField.from_spectrum(grid, spec * q2 / eps)
    rem = RealField.from_spectrum(grid, spec * (1.0 - q0 - q1 - q2) / eps)
    return AnsatzDecomposition(v1=v1, v0=v0, v2=v2, remainder=rem, eps=eps)


# -- carrier modulation ------------------------------------------------------

def demodulate(v1: RealField, eps: float, delta: float = DEFAULT_DELTA,
               energy_tol: float = 0.01) -> ComplexField:
    """Complex amplitude A with v1 = A e^{iX/eps} + c.c.

    A is the positive-frequency band of v1 shifted down by the carrier
    wavenumber.  Rejects input with more than ``energy_tol`` of its energy
    outside the P1 band.
    """
    grid = v1.grid
    if abs(grid.eps - eps) > 1e-9 * eps:
        raise ValueError("eps does not match the grid carrier")
    spec = v1.full_spectrum()
    q1 = make_kernel("P1", delta, eps, grid).evaluate(grid.wavenumbers)
    total = np.sum(np.abs(spec) ** 2)
    if total > 0:
        off = np.sum((1.0 - q1) ** 2 * np.abs(spec) ** 2)
        if off > energy_tol * total:
            raise ValueError("field has significant energy outside the P1 band")
    n = grid.n_points
    pos = np.zeros(n, dtype=np.complex128)
    half = np.arange(1, n // 2)
    pos[half] = spec[half]
    a_spec = np.roll(pos, -grid.carrier_index)
    return ComplexField.from_spectrum(grid, a_spec)


def modulate(A: ComplexField, eps: float) -> RealField:
    """Real field A e^{iX/eps} + c.c. on A's grid."""
    grid = A.grid
    if abs(grid.eps - eps) > 1e-9 * eps:
        raise ValueError("eps does not match the grid carrier")
    spec = A.spectrum()
    n, m = grid.n_points, grid.carrier_index
    # shifting by +m must not push content past Nyquist or below DC
    idx = np.fft.fftfreq(n, d=1.0 / n).astype(int)  # signed mode indices
    shifted = idx + m
    bad = (np.abs(spec) > 1e-12 * (1 + np.max(np.abs(spec)))) & (
        (shifted >= n // 2) | (shifted <= -n // 2))
    if np.any(bad):
        raise ValueError("amplitude band would alias past Nyquist when modulated")
    up = np.roll(spec, m)
    return RealField(grid, 2.0 * np.real(np.fft.ifft(up)))


def kernel_dump_csv(kernel: BandKernel, grid: Grid, path) -> None:
    """Debug dump: CSV columns k,q(k) over the grid's signed wavenumbers."""
    K = np.sort(grid.wavenumbers)
    q = kernel.evaluate(K)
    with open(path, "w") as fh:
        fh.write("k,q\n")
        for k, v in zip(K, q):
            fh.write(f"{k:.12g},{v:.12g}\n")
