"""Fourier-diagonal operators: L = -(1+Laplacian)^2, its rescaled version,
their semigroups, and the scaled band inverse, plus dealiased products.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, TYPE_CHECKING

import numpy as np

from .grid import ComplexField, Grid, RealField

if TYPE_CHECKING:  # pragma: no cover
    from .bands import BandKernel

#: guard on |1 - eps^2 K^2| before inverting on a band
NEAR_SINGULAR_TOL = 1e-6


def symbol_L(k):
    """Multiplier of -(1+Laplacian)^2 at wavenumber k: -(1-k^2)^2."""
    k = np.asarray(k, dtype=np.float64)
    s = -((1.0 - k ** 2) ** 2)
    return s if s.ndim else float(s)


def symbol_L_eps(K, eps: float):
    """Multiplier of the rescaled operator at wavenumber K: -(1-eps^2 K^2)^2/eps^2."""
    if not (0 < eps < 1):
        raise ValueError("eps must lie in (0, 1)")
    K = np.asarray(K, dtype=np.float64)
    s = -((1.0 - (eps * K) ** 2) ** 2) / eps ** 2
    return s if s.ndim else float(s)


@dataclass(frozen=True)
class DiagonalOperator:
    """A Fourier multiplier with a human-readable descriptor."""

    symbol: Callable[[np.ndarray], np.ndarray]
    descriptor: str
    support: Callable[[np.ndarray], np.ndarray] | None = None  # band mask


def op_L() -> DiagonalOperator:
    return DiagonalOperator(symbol_L, "L")


def op_L_eps(eps: float) -> DiagonalOperator:
    symbol_L_eps(0.0, eps)  # validate eps
    return DiagonalOperator(lambda k: symbol_L_eps(k, eps), f"L_eps(eps={eps})")


def op_semigroup_L(t: float) -> DiagonalOperator:
    if t < 0:
        raise ValueError("semigroup time must be non-negative")
    return DiagonalOperator(lambda k: np.exp(np.asarray(symbol_L(k)) * t),
                            f"semigroup_L(t={t})")


def op_semigroup_L_eps(t: float, eps: float) -> DiagonalOperator:
    if t < 0:
        raise ValueError("semigroup time must be non-negative")
    symbol_L_eps(0.0, eps)
    return DiagonalOperator(lambda k: np.exp(np.asarray(symbol_L_eps(k, eps)) * t),
                            f"semigroup_L_eps(T={t}, eps={eps})")


def apply_diagonal(op: DiagonalOperator, f):
    """Multiply f's Fourier coefficients by op's symbol.

    Real fields stay real: the transform uses the Hermitian half-spectrum.
    """
    if isinstance(f, RealField):
        mult = op.symbol(f.grid.rfft_wavenumbers)
        spec = f.spectrum() * mult
        if op.support is not None:
            spec = spec * op.support(f.grid.rfft_wavenumbers)
        return RealField.from_spectrum(f.grid, spec)
    if isinstance(f, ComplexField):
        mult = op.symbol(f.grid.wavenumbers)
        spec = f.spectrum() * mult
        if op.support is not None:
            spec = spec * op.support(f.grid.wavenumbers)
        return ComplexField.from_spectrum(f.grid, spec)
    raise TypeError("expected RealField or ComplexField")


def inv_symbol_scaled(K, eps: float):
    """Symbol of eps^-2 L_eps^-1: -(1 - eps^2 K^2)^-2 (unguarded)."""
    K = np.asarray(K, dtype=np.float64)
    return -1.0 / (1.0 - (eps * K) ** 2) ** 2


def inv_Leps_scaled_on_band(f: RealField, eps: float, band: "BandKernel") -> RealField:
    """Apply eps^-2 L_eps^-1 P_band to f.

    Only defined for the P0/P2 bands, whose supports stay away from the
    neutral wavenumbers +-1/eps where the inverse blows up.
    """
    if band.which not in ("P0", "P2"):
        raise ValueError("scaled inverse is only defined on the P0/P2 bands")
    K = f.grid.rfft_wavenumbers
    q = band.evaluate(K)
    on_support = q > 0
    denom = np.abs(1.0 - (eps * K) ** 2)
    if np.any(denom[on_support] < NEAR_SINGULAR_TOL):
        raise ValueError(
            "near-singular inverse on band support (delta too large for eps)")
    mult = np.zeros_like(K)
    mult[on_support] = (q[on_support]
                        * inv_symbol_scaled(K[on_support], eps))
    return RealField.from_spectrum(f.grid, f.spectrum() * mult)


# -- dealiased pseudospectral products --------------------------------------

def _pad_to_physical(rspec: np.ndarray, n: int, n_pad: int) -> np.ndarray:
    """Zero-pad an rfft half-spectrum and return fine-grid physical samples."""
    padded = np.zeros(n_pad // 2 + 1, dtype=np.complex128)
    padded[: n // 2 + 1] = rspec
    padded[n // 2] = 0.0  # drop the ambiguous coarse Nyquist coefficient
    return np.fft.irfft(padded, n=n_pad) * (n_pad / n)


def _truncate_to_spec(values_pad: np.ndarray, n: int) -> np.ndarray:
    n_pad = values_pad.shape[0]
    spec = np.fft.rfft(values_pad)[: n // 2 + 1] * (n / n_pad)
    spec[n // 2] = 0.0
    return spec


def dealiased_powers(rspec: np.ndarray, n: int, exponents: tuple[int, ...],
                     pad_factor: int) -> dict[int, np.ndarray]:
    """Half-spectra of pointwise powers v**e, computed alias-free.

    pad_factor 2 is exact for quadratic/cubic, 3 for the quintic.
    """
    vp = _pad_to_physical(rspec, n, pad_factor * n)
    return {e: _truncate_to_spec(vp ** e, n) for e in exponents}


def dealiased_product(rspec_a: np.ndarray, rspec_b: np.ndarray, n: int,
                      pad_factor: int = 2) -> np.ndarray:
    """Half-spectrum of the pointwise product of two real fields, alias-free."""
    ap = _pad_to_physical(rspec_a, n, pad_factor * n)
    bp = _pad_to_physical(rspec_b, n, pad_factor * n)
    return _truncate_to_spec(ap * bp, n)


def dealiased_powers_complex(spec: np.ndarray, n: int, exponents: tuple[int, ...],
                             pad_factor: int) -> dict[int, np.ndarray]:
    """Full spectra of A |A|^(e-1) terms for complex A; e in {3, 5}."""
    n_pad = pad_factor * n
    padded = np.zeros(n_pad, dtype=np.complex128)
    half = n // 2
    padded[:half] = spec[:half]
    padded[n_pad - half:] = spec[half:]
    ap = np.fft.ifft(padded) * (n_pad / n)
    out = {}
    for e in exponents:
        w = ap * np.abs(ap) ** (e - 1)
        ws = np.fft.fft(w) * (n / n_pad)
        spec_out = np.empty(n, dtype=np.complex128)
        spec_out[:half] = ws[:half]
        spec_out[half:] = ws[n_pad - half:]
        out[e] = spec_out
    return out
