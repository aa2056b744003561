"""Sobolev norms, the energy functional, and residuals of the exact balance laws.

Norm conventions (L is the domain period, c_j the analysis coefficients):

* ``||u||^2_{L2}    = integral u^2 dx        = L * sum |c_j|^2``
* ``||u||^2_{H^s}   = L * sum (1+k_j^2)^s |c_j|^2``   (inhomogeneous)
* ``|||D|^s u||^2_{L2} = L * sum |k_j|^{2s} |c_j|^2`` (homogeneous)
* ``E(u) = 1/2 |||D|^{1/2} u||^2_{L2} + 1/6 integral u^3 dx``

The cubic integral is collocation quadrature, exact for band-limited fields
whose cube does not alias onto the mean mode.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Union

import numpy as np

from .spectral import Grid, RealField, SpectralField, forward, inverse

if TYPE_CHECKING:
    from .dynamics import Trajectory

Field = Union[RealField, SpectralField]

_TINY = 1e-300


@dataclass(frozen=True)
class DiagnosticsSample:
    """All monitored scalars for one snapshot."""

    t: float
    l2_sq: float
    hhalf_sq: float
    dhalf_sq: float
    dx_sq: float
    d32_sq: float
    energy: float
    cubic: float
    linf: float


@dataclass(frozen=True)
class DiagnosticSeries:
    """Per-step diagnostic time series recorded by the integrator.

    ``u2uxx`` is the collocation quadrature of u^2 * u_xx, the right-hand
    side of the energy balance; it is kept here (not in the CSV schema)
    because the energy-identity residual needs it at every step.
    """

    t: np.ndarray
    l2_sq: np.ndarray
    hhalf_sq: np.ndarray
    dhalf_sq: np.ndarray
    dx_sq: np.ndarray
    d32_sq: np.ndarray
    energy: np.ndarray
    cubic: np.ndarray
    linf: np.ndarray
    u2uxx: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    def sample(self, i: int) -> DiagnosticsSample:
        return DiagnosticsSample(
            t=float(self.t[i]),
            l2_sq=float(self.l2_sq[i]),
            hhalf_sq=float(self.hhalf_sq[i]),
            dhalf_sq=float(self.dhalf_sq[i]),
            dx_sq=float(self.dx_sq[i]),
            d32_sq=float(self.d32_sq[i]),
            energy=float(self.energy[i]),
            cubic=float(self.cubic[i]),
            linf=float(self.linf[i]),
        )


class NormWeights:
    """Precomputed spectral weights for the norms on one grid."""

    def __init__(self, grid: Grid):
        k = grid.wavenumbers
        self.grid = grid
        self.length = grid.length
        self.abs_k = np.abs(k)
        self.k_sq = k * k
        self.abs_k_cubed = self.abs_k**3
        self.hhalf = np.sqrt(1.0 + self.k_sq)
        self.neg_k_sq = -self.k_sq

    def power(self, coeffs: np.ndarray) -> np.ndarray:
        return coeffs.real**2 + coeffs.imag**2


def _coeffs(u: Field) -> tuple[Grid, np.ndarray]:
    if isinstance(u, RealField):
        return u.grid, forward(u).coeffs
    return u.grid, u.coeffs


def l2_norm_sq(u: Field) -> float:
    """Squared L2 norm, integral of u^2 over one period."""
    grid, c = _coeffs(u)
    return float(grid.length * np.sum(c.real**2 + c.imag**2))


def sobolev_norm_sq(u: Field, s: float) -> float:
    """Squared inhomogeneous H^s norm, weight (1+k^2)^s, for s in [0, 2]."""
    if not 0.0 <= s <= 2.0:
        raise ValueError(f"Sobolev order s must lie in [0, 2], got {s}")
    grid, c = _coeffs(u)
    w = (1.0 + grid.wavenumbers**2) ** s
    return float(grid.length * np.sum(w * (c.real**2 + c.imag**2)))


def frac_deriv_norm_sq(u: Field, s: float) -> float:
    """Squared L2 norm of |D|^s u, weight |k|^{2s}."""
    if s < 0:
        raise ValueError(f"fractional order s must be >= 0, got {s}")
    grid, c = _coeffs(u)
    w = np.abs(grid.wavenumbers) ** (2.0 * s)
    return float(grid.length * np.sum(w * (c.real**2 + c.imag**2)))


def cubic_integral(u: Field) -> float:
    """Collocation quadrature of u^3 over one period."""
    if isinstance(u, SpectralField):
        u = inverse(u)
    n = u.grid.n_points
    return float((u.grid.length / n) * np.sum(u.samples**3))


def energy(u: Field) -> float:
    """Energy functional E(u) = 1/2 |||D|^{1/2}u||^2 + 1/6 integral u^3."""
    return 0.5 * frac_deriv_norm_sq(u, 0.5) + cubic_integral(u) / 6.0


def sample_diagnostics(u: Field, t: float = 0.0) -> DiagnosticsSample:
    """Evaluate every monitored scalar on one field."""
    if isinstance(u, SpectralField):
        phys = inverse(u)
        grid, c = u.grid, u.coeffs
    else:
        phys = u
        grid, c = u.grid, forward(u).coeffs
    w = NormWeights(grid)
    p = w.power(c)
    dhalf = float(w.length * np.dot(w.abs_k, p))
    cubic = float((w.length / grid.n_points) * np.sum(phys.samples**3))
    return DiagnosticsSample(
        t=float(t),
        l2_sq=float(w.length * p.sum()),
        hhalf_sq=float(w.length * np.dot(w.hhalf, p)),
        dhalf_sq=dhalf,
        dx_sq=float(w.length * np.dot(w.k_sq, p)),
        d32_sq=float(w.length * np.dot(w.abs_k_cubed, p)),
        energy=0.5 * dhalf + cubic / 6.0,
        cubic=cubic,
        linf=float(np.max(np.abs(phys.samples))),
    )


class DiagnosticsAccumulator:
    """Fills a DiagnosticSeries row by row from raw spectral state.

    Used inside the time loop, where fields exist as bare coefficient
    arrays; two inverse transforms per record (u and u_xx).
    """

    def __init__(self, grid: Grid, n_records: int):
        self.w = NormWeights(grid)
        self.n = grid.n_points
        self._cols = {
            name: np.empty(n_records)
            for name in (
                "t", "l2_sq", "hhalf_sq", "dhalf_sq", "dx_sq", "d32_sq",
                "energy", "cubic", "linf", "u2uxx",
            )
        }

    def record(self, i: int, t: float, coeffs: np.ndarray) -> None:
        w = self.w
        p = w.power(coeffs)
        u = np.fft.ifft(coeffs * self.n).real
        uxx = np.fft.ifft((w.neg_k_sq * coeffs) * self.n).real
        u_sq = u * u
        dx_quad = w.length / self.n
        cubic = dx_quad * np.dot(u_sq, u)
        dhalf = w.length * np.dot(w.abs_k, p)
        c = self._cols
        c["t"][i] = t
        c["l2_sq"][i] = w.length * p.sum()
        c["hhalf_sq"][i] = w.length * np.dot(w.hhalf, p)
        c["dhalf_sq"][i] = dhalf
        c["dx_sq"][i] = w.length * np.dot(w.k_sq, p)
        c["d32_sq"][i] = w.length * np.dot(w.abs_k_cubed, p)
        c["cubic"][i] = cubic
        c["energy"][i] = 0.5 * dhalf + cubic / 6.0
        c["linf"][i] = np.max(np.abs(u))
        c["u2uxx"][i] = dx_quad * np.dot(u_sq, uxx)

    def series(self) -> DiagnosticSeries:
        return DiagnosticSeries(**self._cols)


def _time_derivative(y: np.ndarray, t: np.ndarray) -> np.ndarray:
    # second-order differences, one-sided at the endpoints
    return np.gradient(y, t, edge_order=2)


def l2_identity_residual(traj: "Trajectory") -> np.ndarray:
    """Relative residual of d/dt ||u||^2_{L2} + 2*eps*||u_x||^2_{L2} = 0.

    Returned series is r(t)/scale with scale the peak dissipation term
    2*eps*max(||u_x||^2) for eps > 0; for eps = 0 the identity degenerates
    to pure conservation and the scale is ||u_0||^2_{L2}.
    """
    d = traj.diagnostics
    if len(d) < 3:
        raise ValueError("need at least 3 recorded samples to form residuals")
    eps = traj.config.epsilon
    r = _time_derivative(d.l2_sq, d.t) + 2.0 * eps * d.dx_sq
    if eps > 0:
        scale = max(2.0 * eps * float(d.dx_sq.max()), _TINY)
    else:
        scale = max(float(d.l2_sq[0]), _TINY)
    return r / scale


def energy_identity_residual(traj: "Trajectory") -> np.ndarray:
    """Relative residual of d/dt E(u) + eps*|||D|^{3/2}u||^2 = (eps/2) integral u^2 u_xx.

    Scale is the peak dissipation term eps*max(|||D|^{3/2}u||^2) for
    eps > 0, |E(u_0)| for eps = 0.
    """
    d = traj.diagnostics
    if len(d) < 3:
        raise ValueError("need at least 3 recorded samples to form residuals")
    eps = traj.config.epsilon
    r = _time_derivative(d.energy, d.t) + eps * d.d32_sq - 0.5 * eps * d.u2uxx
    if eps > 0:
        scale = max(eps * float(d.d32_sq.max()), _TINY)
    else:
        scale = max(abs(float(d.energy[0])), _TINY)
    return r / scale


@dataclass(frozen=True)
class InequalityCheck:
    lhs: float
    rhs: float
    ratio: float


def gn_inequality_check(u: Field) -> InequalityCheck:
    """Desk-check of ||u||^2_inf <= 2*||u||_{L2}*||u_x||_{L2} + ||u||^2_{L2}/L.

    The mean correction ||u||^2/L makes the bound valid for fields with
    nonzero mean (equality for constants).  The constant 2 is empirical in
    the sense that only the direction of the inequality is asserted.
    """
    if isinstance(u, SpectralField):
        phys = inverse(u)
    else:
        phys = u
    linf_sq = float(np.max(np.abs(phys.samples)) ** 2)
    if linf_sq == 0.0:
        raise ValueError("inequality check rejects the zero field")
    l2 = np.sqrt(l2_norm_sq(phys))
    dx_l2 = np.sqrt(frac_deriv_norm_sq(phys, 1.0))
    rhs = 2.0 * l2 * dx_l2 + l2**2 / phys.grid.length
    return InequalityCheck(lhs=linf_sq, rhs=rhs, ratio=linf_sq / rhs)
