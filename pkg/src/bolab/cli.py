"""Command-line front end: simulate | sweep | invariants | mms | plot.

Configs are flat JSON documents; unknown keys are hard errors so a typo in
a parameter name cannot silently corrupt a study.  Exit codes: 0 success,
1 invariant failure, 2 configuration error, 3 runtime blow-up.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from dataclasses import replace
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .diagnostics import (
    energy_identity_residual,
    gn_inequality_check,
    l2_identity_residual,
)
from .dynamics import (
    BlowUpError,
    ConfigError,
    SimConfig,
    Trajectory,
    integrate,
    mms_exact,
    resolve_time_step,
)
from .lab import (
    DEFAULT_EPSILONS,
    DEFAULT_ERROR_TIMES,
    ReferenceRejectedError,
    SweepAbortError,
    SweepConfig,
    SweepResult,
    fit_rate,
    monotonicity_report,
    run_sweep,
)
from .spectral import make_grid, real_field

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_CONFIG = 2
EXIT_BLOWUP = 3

CSV_COLUMNS = ("t", "l2_sq", "hhalf_sq", "dhalf_sq", "dx_sq", "d32_sq", "energy", "cubic", "linf")
SWEEP_COLUMNS = ("epsilon", "sup_hhalf_err", "sup_l2_err", "energy_drift", "l2_deficit")

DEFAULT_MMS_DTS = (4e-3, 2e-3, 1e-3, 5e-4)
MMS_ORDER_RANGE = (3.5, 4.5)

# Gates applied by the invariants command.
L2_RESIDUAL_TOL = 1e-5
ENERGY_RESIDUAL_TOL = 1e-4
L2_CONSERVATION_TOL = 1e-8
ENERGY_CONSERVATION_TOL = 1e-6
MONOTONICITY_FACTOR = 1e-10
MONOTONICITY_FACTOR_INVISCID = 1e-8
INEQUALITY_AUDIT_FIELDS = 200

_SIM_KEYS = {
    "epsilon": True,
    "n_points": True,
    "length": True,
    "t_final": True,
    "dt": False,
    "cfl": False,
    "initial_condition": False,
    "dealias": False,
    "snapshot_stride": False,
    "forcing": False,
}

_SWEEP_KEYS = {
    "epsilons": False,
    "n_points": True,
    "length": True,
    "t_final": True,
    "dt": False,
    "cfl": False,
    "initial_condition": False,
    "dealias": False,
    "reference": False,
    "error_times": False,
}

_MMS_KEYS = {
    "epsilon": True,
    "n_points": True,
    "length": True,
    "t_final": True,
    "dts": False,
}


def _fmt(x: float) -> str:
    """Full round-trip decimal formatting (17 significant digits)."""
    return format(float(x), ".17g")


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError("config", f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"malformed JSON in {path}: {exc}") from exc
    if isinstance(doc, dict) and "config" in doc and "config_hash" in doc:
        doc = doc["config"]  # re-running from a manifest
    if not isinstance(doc, dict):
        raise ConfigError("config", f"config {path} must be a JSON object")
    return doc


def _check_keys(doc: dict, schema: dict) -> None:
    unknown = sorted(set(doc) - set(schema))
    if unknown:
        raise ConfigError(unknown[0], f"unknown config key(s): {', '.join(unknown)}")
    missing = sorted(k for k, required in schema.items() if required and k not in doc)
    if missing:
        raise ConfigError(missing[0], f"missing required config key(s): {', '.join(missing)}")


def _int_value(doc: dict, key: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value != int(value):
        raise ConfigError(key, f"{key} must be an integer, got {value!r}")
    return int(value)


def _resolve_sim_config(doc: dict) -> tuple[SimConfig, dict]:
    """Build a SimConfig and the fully-resolved flat dict embedded in manifests."""
    _check_keys(doc, _SIM_KEYS)
    ic = doc.get("initial_condition", "cosine")
    if isinstance(ic, list):
        ic = [float(v) for v in ic]
    cfg = SimConfig(
        epsilon=float(doc["epsilon"]),
        n_points=_int_value(doc, "n_points", doc["n_points"]),
        length=float(doc["length"]),
        t_final=float(doc["t_final"]),
        dt=float(doc["dt"]) if doc.get("dt") is not None else None,
        cfl=float(doc["cfl"]) if doc.get("cfl") is not None else None,
        initial_condition=ic,
        dealias=bool(doc.get("dealias", True)),
        snapshot_stride=1,
        forcing=doc.get("forcing"),
    )
    if cfg.dt is None and cfg.cfl is None:
        cfg = replace(cfg, cfl=1.0)

    stride_raw = doc.get("snapshot_stride", "auto")
    grid = make_grid(cfg.n_points, cfg.length)
    _, n_steps = resolve_time_step(cfg, grid)
    if stride_raw == "auto":
        stride = max(1, math.ceil(n_steps / 200))
    else:
        stride = _int_value(doc, "snapshot_stride", stride_raw)
        if stride < 1:
            raise ConfigError("snapshot_stride", f"snapshot_stride must be >= 1, got {stride}")
    cfg = replace(cfg, snapshot_stride=stride)

    resolved = {
        "epsilon": cfg.epsilon,
        "n_points": cfg.n_points,
        "length": cfg.length,
        "t_final": cfg.t_final,
        "dt": cfg.dt,
        "cfl": cfg.cfl,
        "initial_condition": cfg.initial_condition if isinstance(cfg.initial_condition, str) else list(cfg.initial_condition),
        "dealias": cfg.dealias,
        "snapshot_stride": cfg.snapshot_stride,
        "forcing": cfg.forcing,
    }
    return cfg, resolved


def _resolve_sweep_config(doc: dict, workers: int | None) -> tuple[SweepConfig, dict]:
    _check_keys(doc, _SWEEP_KEYS)
    base_doc = {k: doc[k] for k in ("n_points", "length", "t_final", "dt", "cfl", "initial_condition", "dealias") if k in doc}
    base_doc["epsilon"] = 0.0
    base, resolved_base = _resolve_sim_config(base_doc)
    epsilons = [float(e) for e in doc.get("epsilons", DEFAULT_EPSILONS)]
    error_times = doc.get("error_times", DEFAULT_ERROR_TIMES)
    if isinstance(error_times, list):
        error_times = [float(t) for t in error_times]
    else:
        error_times = _int_value(doc, "error_times", error_times)
    sweep = SweepConfig(
        base=base,
        epsilons=epsilons,
        reference=doc.get("reference", "bo_same_resolution"),
        error_times=error_times,
        workers=workers,
    )
    resolved_base.pop("epsilon")
    resolved_base.pop("snapshot_stride")
    resolved_base.pop("forcing")
    resolved = dict(resolved_base)
    resolved["epsilons"] = epsilons
    resolved["reference"] = sweep.reference
    resolved["error_times"] = error_times
    return sweep, resolved


def _config_hash(resolved: dict) -> str:
    canonical = json.dumps(resolved, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


def _write_manifest(out_dir: str, command: str, resolved: dict, started: str, outputs: list[str]) -> str:
    path = os.path.join(out_dir, "manifest.json")
    manifest = {
        "tool": "bolab",
        "version": __version__,
        "command": command,
        "config": resolved,
        "config_hash": _config_hash(resolved),
        "started_at": started,
        "finished_at": _utc_now(),
        "outputs": sorted(outputs + ["manifest.json"]),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def write_diagnostics_csv(path: str, traj: Trajectory) -> None:
    d = traj.diagnostics
    cols = [d.t, d.l2_sq, d.hhalf_sq, d.dhalf_sq, d.dx_sq, d.d32_sq, d.energy, d.cubic, d.linf]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for i in range(len(d)):
            fh.write(",".join(_fmt(c[i]) for c in cols) + "\n")


def write_snapshots(path: str, traj: Trajectory) -> None:
    """Column-major snapshot table: row m holds u(x_m) across snapshot times."""
    grid = traj.snapshots[0].grid
    table = np.column_stack([s.samples for s in traj.snapshots])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# bolab snapshots\n")
        fh.write(f"# n_points {grid.n_points}\n")
        fh.write(f"# length {_fmt(grid.length)}\n")
        fh.write(f"# n_snapshots {len(traj.times)}\n")
        fh.write("# times " + " ".join(_fmt(t) for t in traj.times) + "\n")
        for row in table:
            fh.write(" ".join(_fmt(v) for v in row) + "\n")


def load_snapshots(path: str):
    """Read a snapshots file back as (grid, times, samples[n_points, n_snapshots])."""
    header = {}
    times = None
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    body_start = 0
    for i, line in enumerate(lines):
        if not line.startswith("#"):
            body_start = i
            break
        parts = line[1:].split()
        if parts and parts[0] == "times":
            times = np.array([float(v) for v in parts[1:]])
        elif len(parts) == 2:
            header[parts[0]] = parts[1]
    grid = make_grid(int(header["n_points"]), float(header["length"]))
    table = np.array([[float(v) for v in line.split()] for line in lines[body_start:]])
    return grid, times, table


def write_sweep_csv(path: str, result: SweepResult) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(SWEEP_COLUMNS) + "\n")
        for r in result.records:
            fh.write(
                ",".join(_fmt(v) for v in (r.epsilon, r.sup_hhalf_err, r.sup_l2_err, r.energy_drift, r.l2_deficit))
                + "\n"
            )


def write_rates_json(path: str, result: SweepResult, warn) -> None:
    def fit_dict(fit):
        return None if fit is None else {"slope": fit.slope, "intercept": fit.intercept, "residual": fit.residual}

    if result.hhalf_fit is None or result.energy_fit is None:
        warn("rate fitting skipped: need at least 3 positive data points")
    doc = {
        "hhalf_rate": None if result.hhalf_fit is None else result.hhalf_fit.slope,
        "energy_rate": None if result.energy_fit is None else result.energy_fit.slope,
        "residuals": {
            "hhalf": None if result.hhalf_fit is None else result.hhalf_fit.residual,
            "energy": None if result.energy_fit is None else result.energy_fit.residual,
        },
        "fits": {"hhalf": fit_dict(result.hhalf_fit), "energy": fit_dict(result.energy_fit)},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_simulate(config_path: str, out_dir: str) -> int:
    started = _utc_now()
    cfg, resolved = _resolve_sim_config(_load_json(config_path))
    traj = integrate(cfg)
    os.makedirs(out_dir, exist_ok=True)
    write_diagnostics_csv(os.path.join(out_dir, "diagnostics.csv"), traj)
    write_snapshots(os.path.join(out_dir, "snapshots.txt"), traj)
    _write_manifest(out_dir, "simulate", resolved, started, ["diagnostics.csv", "snapshots.txt"])
    print(f"simulate: wrote diagnostics.csv, snapshots.txt, manifest.json to {out_dir}")
    return EXIT_OK


def cmd_sweep(config_path: str, out_dir: str, workers: int | None) -> int:
    started = _utc_now()
    sweep, resolved = _resolve_sweep_config(_load_json(config_path), workers)
    result = run_sweep(sweep)
    os.makedirs(out_dir, exist_ok=True)
    write_sweep_csv(os.path.join(out_dir, "sweep.csv"), result)
    write_rates_json(os.path.join(out_dir, "rates.json"), result, warn=lambda m: print(f"warning: {m}", file=sys.stderr))
    _write_manifest(out_dir, "sweep", resolved, started, ["sweep.csv", "rates.json"])
    print(f"sweep: {len(result.records)} epsilon values; wrote sweep.csv, rates.json, manifest.json to {out_dir}")
    return EXIT_OK


def _invariant_checks(traj: Trajectory, seed: int):
    eps = traj.config.epsilon
    d = traj.diagnostics
    checks = []

    if eps > 0:
        r = float(np.max(np.abs(l2_identity_residual(traj))))
        checks.append(("l2_identity", r, L2_RESIDUAL_TOL, "max relative residual"))
        re = float(np.max(np.abs(energy_identity_residual(traj))))
        checks.append(("energy_identity", re, ENERGY_RESIDUAL_TOL, "max relative residual"))
        mono_tol = MONOTONICITY_FACTOR * float(d.l2_sq[0])
    else:
        drift = float(np.max(np.abs(d.l2_sq - d.l2_sq[0]))) / float(d.l2_sq[0])
        checks.append(("l2_identity", drift, L2_CONSERVATION_TOL, "relative drift"))
        e_scale = max(abs(float(d.energy[0])), 1e-12)
        e_drift = float(np.max(np.abs(d.energy - d.energy[0]))) / e_scale
        checks.append(("energy_identity", e_drift, ENERGY_CONSERVATION_TOL, "relative drift"))
        mono_tol = MONOTONICITY_FACTOR_INVISCID * float(d.l2_sq[0])

    mono = monotonicity_report(traj, threshold=mono_tol)
    checks.append(("l2_monotonicity", mono.max_uptick, mono_tol, "max uptick"))

    rng = np.random.default_rng(seed)
    grid = traj.snapshots[0].grid
    n = grid.n_points
    violations = 0
    worst = 0.0
    for _ in range(INEQUALITY_AUDIT_FIELDS):
        modes = rng.integers(1, max(2, n // 6))
        amps = rng.normal(size=modes) / np.arange(1, modes + 1)
        x = grid.points
        samples = rng.normal() * np.ones(n)
        for m, a in enumerate(amps, start=1):
            phase = rng.uniform(0, 2 * np.pi)
            samples += a * np.cos(2 * np.pi * m * x / grid.length + phase)
        check = gn_inequality_check(real_field(grid, samples))
        worst = max(worst, check.ratio)
        if check.ratio > 1.0:
            violations += 1
    checks.append(("interpolation_inequality", float(violations), 0.0, f"violations (worst ratio {worst:.4f})"))
    return checks


def cmd_invariants(config_path: str, seed: int) -> int:
    cfg, _ = _resolve_sim_config(_load_json(config_path))
    traj = integrate(cfg)
    failed = []
    for name, value, tol, label in _invariant_checks(traj, seed):
        ok = value <= tol
        status = "PASS" if ok else "FAIL"
        print(f"{status} {name}: {label} = {value:.3e} (tol {tol:.3e})")
        if not ok:
            failed.append(name)
    if failed:
        print(f"invariant failure: {', '.join(failed)}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_mms(config_path: str, out_dir: str) -> int:
    started = _utc_now()
    doc = _load_json(config_path)
    _check_keys(doc, _MMS_KEYS)
    epsilon = float(doc["epsilon"])
    n_points = _int_value(doc, "n_points", doc["n_points"])
    length = float(doc["length"])
    t_final = float(doc["t_final"])
    dts = [float(v) for v in doc.get("dts", DEFAULT_MMS_DTS)]
    if len(dts) == 0 or any(v <= 0 for v in dts):
        raise ConfigError("dts", "dts must be a non-empty list of positive steps")

    grid = make_grid(n_points, length)
    exact_final = mms_exact("traveling_sine", t_final, grid).samples
    rows = []
    for dt in sorted(dts, reverse=True):
        cfg = SimConfig(
            epsilon=epsilon,
            n_points=n_points,
            length=length,
            t_final=t_final,
            dt=dt,
            forcing="traveling_sine",
            snapshot_stride=10**9,  # final snapshot only
        )
        traj = integrate(cfg)
        err = float(np.max(np.abs(traj.snapshots[-1].samples - exact_final)))
        rows.append({"dt": dt, "sup_error": err})
        print(f"mms: dt={dt:.6g} sup_error={err:.6e}")

    order = None
    residual = None
    if len(rows) >= 3 and all(r["sup_error"] > 0 for r in rows):
        fit = fit_rate([(r["dt"], r["sup_error"]) for r in rows])
        order, residual = fit.slope, fit.residual
        print(f"mms: fitted temporal order {order:.3f} (log-space residual {residual:.3f})")
    else:
        print("mms: order fit skipped (need >= 3 positive errors)", file=sys.stderr)

    resolved = {"epsilon": epsilon, "n_points": n_points, "length": length, "t_final": t_final, "dts": sorted(dts, reverse=True)}
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "mms.json"), "w", encoding="utf-8") as fh:
        json.dump({"errors": rows, "order": order, "order_residual": residual}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(out_dir, "mms", resolved, started, ["mms.json"])

    if order is None or not (MMS_ORDER_RANGE[0] <= order <= MMS_ORDER_RANGE[1]):
        print(
            f"mms: temporal order {'n/a' if order is None else f'{order:.3f}'} outside {MMS_ORDER_RANGE}",
            file=sys.stderr,
        )
        return EXIT_INVARIANT
    return EXIT_OK


# --- SVG rendering -------------------------------------------------------

_SVG_W, _SVG_H = 720, 540
_ML, _MR, _MT, _MB = 80, 170, 40, 60
_SERIES_STYLE = (
    ("sup_hhalf_err", "#1f77b4", "sup H^1/2 error"),
    ("energy_drift", "#d62728", "energy drift"),
)


def _read_sweep_csv(path: str) -> list[dict]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise ConfigError("config", f"cannot read sweep CSV {path}: {exc}") from exc
    if not lines or lines[0].split(",") != list(SWEEP_COLUMNS):
        raise ConfigError("config", f"{path} is not a sweep CSV (expected header {','.join(SWEEP_COLUMNS)})")
    rows = []
    for ln in lines[1:]:
        vals = ln.split(",")
        if len(vals) != len(SWEEP_COLUMNS):
            raise ConfigError("config", f"malformed sweep CSV row: {ln!r}")
        try:
            rows.append({k: float(v) for k, v in zip(SWEEP_COLUMNS, vals)})
        except ValueError as exc:
            raise ConfigError("config", f"malformed sweep CSV value in row {ln!r}") from exc
    if not rows:
        raise ConfigError("config", f"{path} has no data rows")
    return rows


def _px(v: float) -> str:
    return f"{v:.2f}"


def render_sweep_svg(rows: list[dict], warn) -> str:
    """Deterministic log-log SVG: errors vs epsilon with fitted slopes."""
    xs = [r["epsilon"] for r in rows]
    all_pts = {}
    for key, _, _ in _SERIES_STYLE:
        pts = [(e, r[key]) for e, r in zip(xs, rows) if e > 0 and r[key] > 0]
        if len(pts) < len(rows):
            warn(f"dropping {len(rows) - len(pts)} nonpositive {key} point(s) from log-log plot")
        all_pts[key] = pts

    flat = [p for pts in all_pts.values() for p in pts]
    if not flat:
        warn("nothing to plot: no positive values")
        lx0, lx1, ly0, ly1 = -1.0, 1.0, -1.0, 1.0
    else:
        lxs = [math.log10(e) for e, _ in flat]
        lys = [math.log10(v) for _, v in flat]
        lx0, lx1 = min(lxs), max(lxs)
        ly0, ly1 = min(lys), max(lys)
        if lx1 - lx0 < 1e-9:
            lx0, lx1 = lx0 - 0.5, lx1 + 0.5
        if ly1 - ly0 < 1e-9:
            ly0, ly1 = ly0 - 0.5, ly1 + 0.5
        pad_x, pad_y = 0.06 * (lx1 - lx0), 0.06 * (ly1 - ly0)
        lx0, lx1 = lx0 - pad_x, lx1 + pad_x
        ly0, ly1 = ly0 - pad_y, ly1 + pad_y

    pw = _SVG_W - _ML - _MR
    ph = _SVG_H - _MT - _MB

    def sx(le: float) -> float:
        return _ML + (le - lx0) / (lx1 - lx0) * pw

    def sy(lv: float) -> float:
        return _MT + (ly1 - lv) / (ly1 - ly0) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_SVG_W} {_SVG_H}" font-family="monospace" font-size="12">',
        f'<rect x="0" y="0" width="{_SVG_W}" height="{_SVG_H}" fill="white"/>',
        f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
        f'<text x="{_ML + pw / 2:.0f}" y="{_SVG_H - 18}" text-anchor="middle">epsilon</text>',
        f'<text x="20" y="{_MT + ph / 2:.0f}" text-anchor="middle" transform="rotate(-90 20 {_MT + ph / 2:.0f})">error</text>',
    ]

    # decade grid lines and tick labels
    for dec in range(math.floor(lx0), math.ceil(lx1) + 1):
        if lx0 <= dec <= lx1:
            x = sx(dec)
            parts.append(f'<line x1="{_px(x)}" y1="{_MT}" x2="{_px(x)}" y2="{_MT + ph}" stroke="#dddddd"/>')
            parts.append(f'<text x="{_px(x)}" y="{_MT + ph + 16}" text-anchor="middle">1e{dec}</text>')
    for dec in range(math.floor(ly0), math.ceil(ly1) + 1):
        if ly0 <= dec <= ly1:
            y = sy(dec)
            parts.append(f'<line x1="{_ML}" y1="{_px(y)}" x2="{_ML + pw}" y2="{_px(y)}" stroke="#dddddd"/>')
            parts.append(f'<text x="{_ML - 6}" y="{_px(y + 4)}" text-anchor="end">1e{dec}</text>')

    for si, (key, color, label) in enumerate(_SERIES_STYLE):
        pts = all_pts[key]
        if not pts:
            continue
        coords = [(sx(math.log10(e)), sy(math.log10(v))) for e, v in pts]
        if len(coords) >= 2:
            path = " ".join(f"{_px(x)},{_px(y)}" for x, y in coords)
            parts.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for x, y in coords:
            parts.append(f'<circle cx="{_px(x)}" cy="{_px(y)}" r="3" fill="{color}"/>')
        if len(pts) >= 3:
            fit = fit_rate(pts)
            le0, le1 = math.log10(min(e for e, _ in pts)), math.log10(max(e for e, _ in pts))
            # fit line evaluated in log10 coordinates (fit itself is in natural log)
            l10 = math.log(10)
            f0 = (fit.slope * le0 * l10 + fit.intercept) / l10
            f1 = (fit.slope * le1 * l10 + fit.intercept) / l10
            parts.append(
                f'<line x1="{_px(sx(le0))}" y1="{_px(sy(f0))}" x2="{_px(sx(le1))}" y2="{_px(sy(f1))}" '
                f'stroke="{color}" stroke-dasharray="6,4"/>'
            )
            parts.append(
                f'<text x="{_SVG_W - _MR + 10}" y="{_MT + 52 + 20 * si}" fill="{color}">slope {fit.slope:.3f}</text>'
            )
        else:
            warn(f"{label}: fewer than 3 points, fit line skipped")
        parts.append(f'<text x="{_SVG_W - _MR + 10}" y="{_MT + 12 + 20 * si}" fill="{color}">{label}</text>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_plot(sweep_csv_path: str, out_svg_path: str) -> int:
    rows = _read_sweep_csv(sweep_csv_path)
    svg = render_sweep_svg(rows, warn=lambda m: print(f"warning: {m}", file=sys.stderr))
    out_parent = os.path.dirname(os.path.abspath(out_svg_path))
    os.makedirs(out_parent, exist_ok=True)
    with open(out_svg_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg)
    print(f"plot: wrote {out_svg_path}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bolab", description="Benjamin-Ono / BO-Burgers spectral laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="path to flat JSON config")
        p.add_argument("--out", default=".", help="output directory (env BOLAB_OUT overrides)")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized property suites")

    p_sim = sub.add_parser("simulate", help="run one solve; write diagnostics CSV + snapshots")
    add_common(p_sim)
    p_sweep = sub.add_parser("sweep", help="run an epsilon sweep; write sweep CSV + rates JSON")
    add_common(p_sweep)
    p_sweep.add_argument("--workers", type=int, default=None, help="parallel member runs (default: available parallelism)")
    p_inv = sub.add_parser("invariants", help="run the balance-law residual suite")
    add_common(p_inv)
    p_mms = sub.add_parser("mms", help="manufactured-solution accuracy and temporal-order study")
    add_common(p_mms)
    p_plot = sub.add_parser("plot", help="render a sweep CSV as a log-log SVG")
    p_plot.add_argument("sweep_csv", help="sweep CSV produced by the sweep command")
    p_plot.add_argument("out_svg", help="output SVG path")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "plot":
            return cmd_plot(args.sweep_csv, args.out_svg)
        out_dir = os.environ.get("BOLAB_OUT") or args.out
        if args.command == "simulate":
            return cmd_simulate(args.config, out_dir)
        if args.command == "sweep":
            return cmd_sweep(args.config, out_dir, args.workers)
        if args.command == "invariants":
            return cmd_invariants(args.config, args.seed)
        if args.command == "mms":
            return cmd_mms(args.config, out_dir)
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"config error [{exc.field}]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BlowUpError as exc:
        print(f"blow-up: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except SweepAbortError as exc:
        print(f"blow-up: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except ReferenceRejectedError as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
