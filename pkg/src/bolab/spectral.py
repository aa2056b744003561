"""Periodic grid, discrete Fourier transforms, and Fourier-multiplier operators.

Conventions used throughout the package:

* Coefficients are "analysis" coefficients: the coefficient ``c_j`` of the
  plane wave ``exp(i*k_j*x)`` is 1, i.e. ``coeffs = fft(samples)/n``.
* Wavenumbers follow FFT ordering, ``k_j = 2*pi*j/L`` for integer indices
  ``j in {0, 1, ..., n/2-1, -n/2, ..., -1}``.  The single unpaired mode
  ``j = -n/2`` is the Nyquist mode.
* Real fields correspond to Hermitian-symmetric coefficients,
  ``c_{-j} = conj(c_j)``, with real ``c_0`` and Nyquist coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [0, L) with its FFT wavenumber set."""

    n_points: int
    length: float

    @property
    def points(self) -> np.ndarray:
        """Collocation points x_m = m*L/n, m = 0..n-1."""
        return np.arange(self.n_points) * (self.length / self.n_points)

    @property
    def wavenumbers(self) -> np.ndarray:
        """k_j = 2*pi*j/L in FFT ordering."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.length / self.n_points)

    @property
    def mode_indices(self) -> np.ndarray:
        """Integer mode indices j in FFT ordering."""
        return np.fft.fftfreq(self.n_points, d=1.0 / self.n_points).astype(int)

    @property
    def nyquist_index(self) -> int:
        """Array position of the unpaired j = -n/2 mode."""
        return self.n_points // 2


@dataclass(frozen=True)
class RealField:
    """A real-valued snapshot u(x_m) on a grid."""

    grid: Grid
    samples: np.ndarray


@dataclass(frozen=True)
class SpectralField:
    """Fourier coefficients of a field, indexed like the grid wavenumbers."""

    grid: Grid
    coeffs: np.ndarray


def make_grid(n_points: int, length: float) -> Grid:
    """Build a periodic grid; n_points must be even and >= 8, length > 0."""
    if not isinstance(n_points, (int, np.integer)):
        raise ValueError(f"n_points must be an integer, got {n_points!r}")
    if n_points < 8:
        raise ValueError(f"n_points must be >= 8, got {n_points}")
    if n_points % 2 != 0:
        raise ValueError(f"n_points must be even, got {n_points}")
    if not np.isfinite(length) or length <= 0:
        raise ValueError(f"length must be a positive real, got {length!r}")
    return Grid(int(n_points), float(length))


def real_field(grid: Grid, samples) -> RealField:
    """Wrap samples as a RealField, validating shape and finiteness."""
    arr = np.asarray(samples, dtype=float)
    if arr.shape != (grid.n_points,):
        raise ValueError(f"samples shape {arr.shape} does not match grid ({grid.n_points},)")
    if not np.all(np.isfinite(arr)):
        raise ValueError("samples contain non-finite values")
    return RealField(grid, arr)


def forward(f: RealField) -> SpectralField:
    """Forward transform; c_j of exp(i*k_j*x) equals 1."""
    if not np.all(np.isfinite(f.samples)):
        raise ValueError("samples contain non-finite values")
    coeffs = np.fft.fft(f.samples) / f.grid.n_points
    return SpectralField(f.grid, coeffs)


def inverse(F: SpectralField) -> RealField:
    """Inverse transform back to collocation samples (real part)."""
    if not np.all(np.isfinite(F.coeffs)):
        raise ValueError("coefficients contain non-finite values")
    samples = np.fft.ifft(F.coeffs * F.grid.n_points).real
    return RealField(F.grid, samples)


def hilbert(F: SpectralField) -> SpectralField:
    """Hilbert transform: c_j -> -i*sgn(k_j)*c_j, with sgn(0) = 0.

    Turns cos(kx) into sin(kx); annihilates the mean mode.
    """
    mult = -1j * np.sign(F.grid.wavenumbers)
    return SpectralField(F.grid, mult * F.coeffs)


def frac_deriv(F: SpectralField, s: float) -> SpectralField:
    """Fractional derivative |D|^s: c_j -> |k_j|^s * c_j, s >= 0."""
    if s < 0:
        raise ValueError(f"fractional order s must be >= 0, got {s}")
    if s == 0:
        return SpectralField(F.grid, F.coeffs.copy())
    mult = np.abs(F.grid.wavenumbers) ** s
    return SpectralField(F.grid, mult * F.coeffs)


def dx(F: SpectralField) -> SpectralField:
    """Spatial derivative: c_j -> i*k_j*c_j, with the Nyquist mode zeroed.

    The Nyquist wavenumber is sign-ambiguous under i*k, so it is dropped to
    keep the inverse transform real.
    """
    mult = 1j * F.grid.wavenumbers
    mult[F.grid.nyquist_index] = 0.0
    return SpectralField(F.grid, mult * F.coeffs)


def dealias(F: SpectralField) -> SpectralField:
    """2/3-rule truncation: zero every mode with |j| > floor(n/3)."""
    return SpectralField(F.grid, F.coeffs * dealias_mask(F.grid))


def dealias_mask(grid: Grid) -> np.ndarray:
    """Boolean keep-mask for the 2/3 rule on integer mode indices."""
    cutoff = grid.n_points // 3
    return np.abs(grid.mode_indices) <= cutoff


def hermitian_asymmetry(F: SpectralField) -> float:
    """Max deviation from c_{-j} = conj(c_j) (0 for an exactly real field)."""
    c = F.coeffs
    flipped = np.conj(np.roll(c[::-1], 1))  # maps index j to -j
    pair_err = np.max(np.abs(c - flipped))
    special = max(abs(c[0].imag), abs(c[F.grid.nyquist_index].imag))
    return float(max(pair_err, special))
