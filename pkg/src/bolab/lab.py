"""Inviscid-limit experiments: reference solves, dissipation sweeps, rate fits.

A sweep integrates the dissipative equation for a decreasing ladder of
epsilon values plus one eps = 0 reference, all with the same grid and the
same fixed time step so that discretization error largely cancels in the
differences.  Per-epsilon records collect the sup-in-time energy-norm and
L2 errors against the reference, the energy drift, and the L2 deficit,
then power laws are fitted in log-log coordinates.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

import numpy as np

from .diagnostics import l2_norm_sq, sobolev_norm_sq
from .dynamics import (
    BlowUpError,
    ConfigError,
    SimConfig,
    Trajectory,
    integrate,
    resolve_time_step,
)
from .spectral import Grid, RealField, make_grid

REFERENCE_MODES = ("bo_same_resolution", "bo_refined")

# Conservation gates a reference solve must pass to be trusted.
REFERENCE_L2_DRIFT_TOL = 1e-8
REFERENCE_ENERGY_DRIFT_TOL = 1e-6

DEFAULT_EPSILONS = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)
DEFAULT_ERROR_TIMES = 101


class ReferenceRejectedError(RuntimeError):
    """The eps = 0 reference solve failed its conservation gates."""


class SweepAbortError(RuntimeError):
    """A member run blew up; the whole sweep is abandoned."""

    def __init__(self, epsilon: float, t_last: float):
        super().__init__(
            f"sweep member epsilon={epsilon:.6g} blew up at t={t_last:.6g}; sweep aborted"
        )
        self.epsilon = epsilon
        self.t_last = t_last


@dataclass(frozen=True)
class SweepConfig:
    """One inviscid-limit study: a base solve repeated across epsilons."""

    base: SimConfig
    epsilons: Sequence[float] = DEFAULT_EPSILONS
    reference: str = "bo_same_resolution"
    error_times: Union[int, Sequence[float]] = DEFAULT_ERROR_TIMES
    workers: Optional[int] = None
    keep_trajectories: bool = False

    def __post_init__(self):
        eps = np.asarray(self.epsilons, dtype=float)
        if eps.size == 0 or np.any(eps <= 0) or not np.all(np.isfinite(eps)):
            raise ConfigError("epsilons", "epsilons must be positive reals")
        if eps.size > 1 and not np.all(np.diff(eps) < 0):
            raise ConfigError("epsilons", "epsilons must be strictly decreasing")
        if self.reference not in REFERENCE_MODES:
            raise ConfigError("reference", f"unknown reference mode {self.reference!r}; choose from {REFERENCE_MODES}")
        if isinstance(self.error_times, (int, np.integer)):
            if self.error_times < 2:
                raise ConfigError("error_times", "error_times count must be >= 2")
        else:
            ts = np.asarray(self.error_times, dtype=float)
            if ts.size == 0 or np.any(ts < 0) or np.any(ts > self.base.t_final):
                raise ConfigError("error_times", "error_times must lie within [0, t_final]")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers", "workers must be a positive integer")


@dataclass(frozen=True)
class SweepRecord:
    """Errors and drifts for one dissipation coefficient."""

    epsilon: float
    sup_hhalf_err: float
    sup_l2_err: float
    energy_drift: float
    l2_deficit: float
    diss_integral: float  # 2*eps * integral of ||u_x||^2 dt, for the budget check


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residual: float


@dataclass(frozen=True)
class SweepResult:
    config: SweepConfig
    records: list[SweepRecord]
    hhalf_fit: Optional[FitResult]
    energy_fit: Optional[FitResult]
    error_times: np.ndarray
    trajectories: Optional[list[Trajectory]] = None


@dataclass(frozen=True)
class MonotonicityReport:
    max_uptick: float
    passed: bool


def fit_rate(points: Sequence[tuple[float, float]]) -> FitResult:
    """Least-squares power-law fit value ~ C * eps^slope in log-log space."""
    pts = list(points)
    if len(pts) < 3:
        raise ValueError(f"rate fit needs at least 3 points, got {len(pts)}")
    bad = [e for e, v in pts if v <= 0]
    if bad:
        raise ValueError(
            "rate fit needs positive values; "
            f"epsilon={', '.join(f'{e:.6g}' for e in bad)} produced none"
        )
    log_e = np.log(np.array([e for e, _ in pts]))
    log_v = np.log(np.array([v for _, v in pts]))
    slope, intercept = np.polyfit(log_e, log_v, 1)
    resid = log_v - (slope * log_e + intercept)
    return FitResult(
        slope=float(slope),
        intercept=float(intercept),
        residual=float(np.sqrt(np.mean(resid**2))),
    )


def monotonicity_report(traj: Trajectory, threshold: Optional[float] = None) -> MonotonicityReport:
    """Largest positive increment of ||u||^2_{L2} along the trajectory.

    Default pass threshold is 1e-10 * ||u_0||^2; dissipative runs must not
    exceed it, while eps = 0 runs are only drift-level monotone.
    """
    l2 = traj.diagnostics.l2_sq
    increments = np.diff(l2)
    max_uptick = float(max(increments.max(initial=0.0), 0.0))
    if threshold is None:
        threshold = 1e-10 * float(l2[0])
    return MonotonicityReport(max_uptick=max_uptick, passed=max_uptick <= threshold)


def _truncate_to_grid(fine: RealField, grid: Grid) -> RealField:
    """Spectral restriction of a finer-grid field onto a coarser grid."""
    n, n_fine = grid.n_points, fine.grid.n_points
    c_fine = np.fft.fft(fine.samples) / n_fine
    c = np.zeros(n, dtype=complex)
    c[: n // 2] = c_fine[: n // 2]
    c[n // 2 + 1 :] = c_fine[n_fine - n // 2 + 1 :]
    return RealField(grid, np.fft.ifft(c * n).real)


def _check_reference_conservation(traj: Trajectory) -> None:
    d = traj.diagnostics
    l2_drift = float(np.max(np.abs(d.l2_sq - d.l2_sq[0]))) / d.l2_sq[0]
    e_scale = max(abs(float(d.energy[0])), 1e-12)
    e_drift = float(np.max(np.abs(d.energy - d.energy[0]))) / e_scale
    if l2_drift > REFERENCE_L2_DRIFT_TOL or e_drift > REFERENCE_ENERGY_DRIFT_TOL:
        raise ReferenceRejectedError(
            "reference solve failed conservation gates: "
            f"relative L2 drift {l2_drift:.3e} (tol {REFERENCE_L2_DRIFT_TOL:.0e}), "
            f"relative energy drift {e_drift:.3e} (tol {REFERENCE_ENERGY_DRIFT_TOL:.0e}); "
            "increase n_points or reduce dt"
        )


def reference_solution(cfg: SimConfig, refined: bool = False) -> Trajectory:
    """Dissipation-free solve used as the limit target.

    With ``refined`` the solve runs at doubled resolution and halved step,
    and snapshots are spectrally restricted back to the requested grid (an
    audit of discretization-error cancellation).  The result must pass the
    conservation gates or it is rejected.
    """
    base = replace(cfg, epsilon=0.0)
    if not refined:
        traj = integrate(base)
        _check_reference_conservation(traj)
        return traj

    grid = make_grid(cfg.n_points, cfg.length)
    dt, _ = resolve_time_step(base, grid)
    fine_cfg = replace(
        base,
        n_points=2 * cfg.n_points,
        dt=0.5 * dt,
        cfl=None,
        snapshot_stride=2 * cfg.snapshot_stride,
    )
    fine = integrate(fine_cfg)
    _check_reference_conservation(fine)
    snapshots = [_truncate_to_grid(s, grid) for s in fine.snapshots]
    return Trajectory(
        config=base,
        times=fine.times,
        snapshots=snapshots,
        diagnostics=fine.diagnostics,
    )


def _resolve_error_times(sweep: SweepConfig, dt: float, n_steps: int, stride: int) -> tuple[np.ndarray, np.ndarray]:
    """Map requested error times onto available snapshot indices.

    Returns (indices into the snapshot list, the actual sampled times).
    Snapshot steps are 0, stride, 2*stride, ..., plus the final step.
    """
    snap_steps = list(range(0, n_steps + 1, stride))
    if snap_steps[-1] != n_steps:
        snap_steps.append(n_steps)
    snap_steps = np.asarray(snap_steps)
    snap_times = snap_steps * dt

    if isinstance(sweep.error_times, (int, np.integer)):
        requested = np.linspace(0.0, sweep.base.t_final, int(sweep.error_times))
    else:
        requested = np.asarray(sweep.error_times, dtype=float)
    idx = np.unique([int(np.argmin(np.abs(snap_times - t))) for t in requested])
    return idx, snap_times[idx]


def _member_config(sweep: SweepConfig, epsilon: float, dt: float, stride: int) -> SimConfig:
    return replace(
        sweep.base,
        epsilon=float(epsilon),
        dt=dt,
        cfl=None,
        snapshot_stride=stride,
    )


def _integrate_member(cfg: SimConfig) -> Trajectory:
    return integrate(cfg)


def _member_record(
    member: Trajectory,
    reference: Trajectory,
    error_idx: np.ndarray,
) -> SweepRecord:
    sup_hhalf = 0.0
    sup_l2 = 0.0
    grid = reference.snapshots[0].grid
    for i in error_idx:
        diff = RealField(grid, member.snapshots[i].samples - reference.snapshots[i].samples)
        sup_hhalf = max(sup_hhalf, np.sqrt(sobolev_norm_sq(diff, 0.5)))
        sup_l2 = max(sup_l2, np.sqrt(l2_norm_sq(diff)))
    d = member.diagnostics
    eps = member.config.epsilon
    return SweepRecord(
        epsilon=eps,
        sup_hhalf_err=float(sup_hhalf),
        sup_l2_err=float(sup_l2),
        energy_drift=float(np.max(np.abs(d.energy - d.energy[0]))),
        l2_deficit=float(d.l2_sq[0] - d.l2_sq[-1]),
        diss_integral=float(2.0 * eps * np.trapezoid(d.dx_sq, d.t)),
    )


def run_sweep(sweep: SweepConfig) -> SweepResult:
    """Run the full epsilon ladder against the reference and fit rates.

    Member runs execute in parallel (bounded by ``workers``); records are
    reduced in ladder order, so results are deterministic regardless of
    scheduling.
    """
    grid = make_grid(sweep.base.n_points, sweep.base.length)
    dt, n_steps = resolve_time_step(replace(sweep.base, epsilon=0.0), grid)
    count = sweep.error_times if isinstance(sweep.error_times, (int, np.integer)) else len(sweep.error_times)
    stride = max(1, round(n_steps / max(1, count - 1)))

    reference = reference_solution(
        _member_config(sweep, 0.0, dt, stride),
        refined=(sweep.reference == "bo_refined"),
    )
    error_idx, error_times = _resolve_error_times(sweep, dt, n_steps, stride)

    configs = [_member_config(sweep, eps, dt, stride) for eps in sweep.epsilons]
    workers = sweep.workers
    if workers is None:
        workers = max(1, min(len(configs), os.cpu_count() or 1))

    trajectories: list[Trajectory] = []
    if workers == 1 or len(configs) == 1:
        for c in configs:
            try:
                trajectories.append(_integrate_member(c))
            except BlowUpError as exc:
                raise SweepAbortError(c.epsilon, exc.t_last) from exc
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_integrate_member, c) for c in configs]
            for c, fut in zip(configs, futures):
                try:
                    trajectories.append(fut.result())
                except BlowUpError as exc:
                    raise SweepAbortError(c.epsilon, exc.t_last) from exc

    records = [_member_record(traj, reference, error_idx) for traj in trajectories]

    hhalf_fit = energy_fit = None
    if len(records) >= 3:
        try:
            hhalf_fit = fit_rate([(r.epsilon, r.sup_hhalf_err) for r in records])
        except ValueError:
            hhalf_fit = None
        try:
            energy_fit = fit_rate([(r.epsilon, r.energy_drift) for r in records])
        except ValueError:
            energy_fit = None

    return SweepResult(
        config=sweep,
        records=records,
        hhalf_fit=hhalf_fit,
        energy_fit=energy_fit,
        error_times=error_times,
        trajectories=trajectories if sweep.keep_trajectories else None,
    )
