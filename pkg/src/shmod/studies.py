"""Seeded ensemble studies, incremental record output, and replay.

A study is a grid of independent cells, one per (parameter set, seed).
Each cell runs a simulation and reports scalar diagnostics.  Records are
appended to ``records.csv`` as cells finish (single writer), so an
interrupted study can be re-run and will skip completed cells.  A
``manifest.json`` pins the package version and the full configuration;
``replay`` re-executes recorded cells and verifies bit-identical
diagnostics.
"""

from __future__ import annotations

import csv
import json
import time
import warnings
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from . import __version__
from .grid import Grid
from .noise import NoiseConfig
from .sh import ModelParams, simulate, modulated_carrier_ic
from .bands import make_kernel, project_complement
from .reduced import simulate_paired
from .analysis import (
    averaging_residual,
    estimate_landau_coefficient,
    fit_scaling_exponent,
)

DEFAULT_EPS_LADDER = (0.2, 0.14, 0.1, 0.07, 0.05)
DEFAULT_NU_SWEEP = (0.0, 0.3, 0.6, 0.84294, 1.0)

STUDY_NAMES = (
    "attractivity",
    "averaging",
    "theorem2",
    "gl-limit",
    "landau-sweep",
    "quintic-suite",
)

#: Transient skipped before attractivity statistics are collected, as a
#: fraction of the horizon.  The off-band component of the initial data
#: decays on the fast time scale eps^2*log(1/eps), well inside this window.
ATTRACTIVITY_SKIP = 0.5


class ConfigError(ValueError):
    """Invalid or inconsistent study configuration."""


class ReplayError(RuntimeError):
    """Replay could not be validated against the recorded manifest."""


@dataclass(frozen=True)
class StudyConfig:
    """Full description of one study run.

    ``amplitude`` is the sup-norm of the random modulation envelope of the
    initial data and ``intensity`` the noise level; both default per study
    (see :meth:`for_study`).
    """

    study: str
    out_dir: Path
    eps_list: tuple = DEFAULT_EPS_LADDER
    nu_list: tuple = (0.5,)
    nu2: float = 1.0
    nu3: float = 0.0
    n_seeds: int = 50
    base_seed: int = 20260826
    n_points: int = 2048
    periods: int = 128
    delta: float = 0.125
    dt: float = 1e-3
    t_end: float = 1.0
    intensity: float = 0.07
    amplitude: float = 0.5
    offband: float = 0.0
    threads: int = 1

    #: Per-study defaults applied by :meth:`for_study` for fields the
    #: caller did not set explicitly.
    _STUDY_DEFAULTS = {
        "attractivity": {"intensity": 0.01, "amplitude": 0.5, "offband": 1.0},
        "averaging": {"intensity": 0.07, "amplitude": 0.5},
        "theorem2": {"intensity": 0.07, "amplitude": 0.5},
        "gl-limit": {"intensity": 0.07, "amplitude": 0.5},
        "landau-sweep": {
            "eps_list": (0.1,),
            "nu_list": DEFAULT_NU_SWEEP,
            "n_seeds": 1,
            "n_points": 8192,
            "periods": 512,
        },
        "quintic-suite": {
            "eps_list": (0.1,),
            "n_seeds": 1,
            "n_points": 8192,
            "periods": 512,
        },
    }

    @classmethod
    def for_study(cls, study: str, out_dir, **overrides) -> "StudyConfig":
        """Build a config with per-study defaults, then apply overrides."""
        if study not in STUDY_NAMES:
            raise ConfigError(f"unknown study {study!r}; choose from {STUDY_NAMES}")
        merged = dict(cls._STUDY_DEFAULTS.get(study, {}))
        merged.update({k: v for k, v in overrides.items() if v is not None})
        cfg = cls(study=study, out_dir=Path(out_dir), **merged)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.study not in STUDY_NAMES:
            raise ConfigError(f"unknown study {self.study!r}")
        if not self.eps_list:
            raise ConfigError("eps_list must be non-empty")
        if self.n_seeds <= 0:
            raise ConfigError("n_seeds must be positive")
        if not self.nu_list:
            raise ConfigError("nu_list must be non-empty")
        if self.dt <= 0 or self.t_end <= 0:
            raise ConfigError("dt and t_end must be positive")
        if self.threads <= 0:
            raise ConfigError("threads must be positive")
        if not 0 < self.delta <= 0.5:
            raise ConfigError("delta must lie in (0, 1/2]")
        if self.intensity < 0:
            raise ConfigError("intensity must be non-negative")
        for eps in self.eps_list:
            # Raises if the band layout does not fit this grid.
            try:
                grid = Grid.for_carrier(eps, self.n_points,
                                        periods=self.periods)
                make_kernel("P1", self.delta, grid.eps, grid)
                make_kernel("P2", self.delta, grid.eps, grid)
            except ValueError as exc:
                raise ConfigError(f"band layout invalid at eps={eps}: {exc}") \
                    from exc

    def public_dict(self) -> dict:
        d = asdict(self)
        d["out_dir"] = str(self.out_dir)
        d["eps_list"] = list(self.eps_list)
        d["nu_list"] = list(self.nu_list)
        return d

    @classmethod
    def from_public_dict(cls, d: dict) -> "StudyConfig":
        d = dict(d)
        d["out_dir"] = Path(d["out_dir"])
        d["eps_list"] = tuple(d["eps_list"])
        d["nu_list"] = tuple(d["nu_list"])
        return cls(**d)


@dataclass(frozen=True)
class StudyRecord:
    """One completed cell: parameters, seed, and scalar diagnostics."""

    study: str
    params: dict
    seed: int
    diagnostics: dict
    status: str
    eps_effective: float
    wall_time: float

    @property
    def key(self) -> str:
        return record_key(self.study, self.params, self.seed)

    def diagnostics_repr(self) -> dict:
        """Diagnostics with floats rendered exactly, for bit-exact replay."""
        return {k: float(v).hex() for k, v in self.diagnostics.items()}


def record_key(study: str, params: dict, seed: int) -> str:
    parts = [study] + [f"{k}={params[k]:.10g}" for k in sorted(params)] + [f"seed={seed}"]
    return "|".join(parts)


# ---------------------------------------------------------------------------
# Cell execution


def _noise_for(cfg: StudyConfig, seed: int) -> NoiseConfig:
    return NoiseConfig(seed=cfg.base_seed + seed, intensity=cfg.intensity)


def _paired_cell(cfg: StudyConfig, eps: float, nu: float, seed: int, with_gl: bool) -> dict:
    grid = Grid.for_carrier(eps, cfg.n_points, periods=cfg.periods)
    ncfg = _noise_for(cfg, seed)
    v0 = modulated_carrier_ic(
        grid, grid.eps, ncfg.substream(1).make_rng(),
        amplitude=cfg.amplitude, delta=cfg.delta, offband=cfg.offband,
    )
    params = ModelParams("cubic", eps=grid.eps, nu=nu, dt=cfg.dt, t_end=cfg.t_end)
    result = simulate_paired(
        v0, params, ncfg, delta=cfg.delta, snapshot_stride=1, with_gl=with_gl
    )
    diags = {"sup_diff": result.sup_diff}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        diags["res_p0"] = averaging_residual(result.traj_v, grid.eps, nu, "P0", cfg.delta)
        diags["res_p2"] = averaging_residual(result.traj_v, grid.eps, nu, "P2", cfg.delta)
    if with_gl:
        diags["sup_diff_gl"] = result.sup_diff_gl
    return diags


def _attractivity_cell(cfg: StudyConfig, eps: float, nu: float, seed: int) -> dict:
    grid = Grid.for_carrier(eps, cfg.n_points, periods=cfg.periods)
    ncfg = _noise_for(cfg, seed)
    v0 = modulated_carrier_ic(
        grid, grid.eps, ncfg.substream(1).make_rng(),
        amplitude=cfg.amplitude, delta=cfg.delta, offband=cfg.offband,
    )
    params = ModelParams("cubic", eps=grid.eps, nu=nu, dt=cfg.dt, t_end=cfg.t_end)
    traj = simulate(v0, params, ncfg, snapshot_stride=10)
    q1 = make_kernel("P1", cfg.delta, grid.eps, grid)
    t_skip = ATTRACTIVITY_SKIP * cfg.t_end
    sup = max(
        project_complement(snap, q1).sup_norm()
        for t, snap in zip(traj.times, traj.snapshots)
        if t >= t_skip
    )
    return {"offband_sup": sup, "offband_ratio": sup / grid.eps}


def _landau_cell(cfg: StudyConfig, eps: float, nu, seed: int, variant: str) -> dict:
    fit_quintic = variant == "quintic"
    fit = estimate_landau_coefficient(
        eps,
        nu,
        variant=variant,
        amplitude=0.2,
        n_points=cfg.n_points,
        dt=cfg.dt,
        delta=cfg.delta,
        fit_window=8.0 if fit_quintic else None,
        fit_quintic=fit_quintic,
    )
    diags = {"c3": fit.c3, "r_squared": fit.r_squared}
    if fit_quintic:
        diags["c5"] = fit.c5
    return diags


def _run_cell(cfg: StudyConfig, params: dict, seed: int) -> StudyRecord:
    start = time.perf_counter()
    eps = params.get("eps", cfg.eps_list[0])
    grid_eps = Grid.for_carrier(eps, cfg.n_points, periods=cfg.periods).eps
    status = "ok"
    try:
        if cfg.study in ("theorem2", "averaging"):
            diags = _paired_cell(cfg, eps, params["nu"], seed, with_gl=False)
        elif cfg.study == "gl-limit":
            diags = _paired_cell(cfg, eps, params["nu"], seed, with_gl=True)
        elif cfg.study == "attractivity":
            diags = _attractivity_cell(cfg, eps, params["nu"], seed)
        elif cfg.study == "landau-sweep":
            diags = _landau_cell(cfg, eps, params["nu"], seed, variant="cubic")
        elif cfg.study == "quintic-suite":
            diags = _landau_cell(
                cfg, eps, (params["nu2"], params["nu3"]), seed, variant="quintic"
            )
        else:  # pragma: no cover - guarded by validate()
            raise ConfigError(f"unknown study {cfg.study!r}")
    except RuntimeError as exc:
        status = f"error: {exc}"
        diags = {}
    return StudyRecord(
        study=cfg.study,
        params=params,
        seed=seed,
        diagnostics=diags,
        status=status,
        eps_effective=grid_eps,
        wall_time=time.perf_counter() - start,
    )


def study_cells(cfg: StudyConfig) -> list:
    """The full (params, seed) grid for a study, in deterministic order."""
    cells = []
    if cfg.study == "quintic-suite":
        for nu2, nu3 in ((0.0, 0.0), (cfg.nu2, cfg.nu3)):
            for eps in cfg.eps_list:
                for seed in range(cfg.n_seeds):
                    cells.append(({"eps": eps, "nu2": nu2, "nu3": nu3}, seed))
        return cells
    for nu in cfg.nu_list:
        for eps in cfg.eps_list:
            for seed in range(cfg.n_seeds):
                cells.append(({"eps": eps, "nu": nu}, seed))
    return cells


# ---------------------------------------------------------------------------
# Record persistence

_RECORD_FIELDS = (
    "key", "study", "seed", "eps_effective", "status",
    "wall_time", "params", "diagnostics",
)


def append_record(path: Path, record: StudyRecord) -> None:
    new = not path.exists()
    with open(path, "a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=_RECORD_FIELDS)
        if new:
            writer.writeheader()
        writer.writerow(
            {
                "key": record.key,
                "study": record.study,
                "seed": record.seed,
                "eps_effective": f"{record.eps_effective:.17g}",
                "status": record.status,
                "wall_time": f"{record.wall_time:.6f}",
                "params": json.dumps(record.params, sort_keys=True),
                "diagnostics": json.dumps(record.diagnostics_repr(), sort_keys=True),
            }
        )
        fh.flush()


def load_records(path: Path) -> list:
    if not path.exists():
        return []
    records = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            diags = {k: float.fromhex(v) for k, v in json.loads(row["diagnostics"]).items()}
            records.append(
                StudyRecord(
                    study=row["study"],
                    params=json.loads(row["params"]),
                    seed=int(row["seed"]),
                    diagnostics=diags,
                    status=row["status"],
                    eps_effective=float(row["eps_effective"]),
                    wall_time=float(row["wall_time"]),
                )
            )
    return records


# ---------------------------------------------------------------------------
# Summaries


def _median_by_eps(records, diag, selector=lambda r: True):
    by_eps = {}
    for r in records:
        if r.status == "ok" and diag in r.diagnostics and selector(r):
            by_eps.setdefault(r.params["eps"], []).append(r.diagnostics[diag])
    return {eps: float(np.median(v)) for eps, v in sorted(by_eps.items())}


def _slope_fit(medians: dict):
    pairs = [(e, m) for e, m in medians.items() if m > 0]
    if len(pairs) < 3:
        return None
    return fit_scaling_exponent(pairs)


def summarize(cfg: StudyConfig, records: list) -> dict:
    """Study-level scaling fits and pass/fail gates."""
    summary = {
        "study": cfg.study,
        "version": __version__,
        "n_records": len(records),
        "n_failed": sum(1 for r in records if r.status != "ok"),
        "fits": {},
        "acceptance": {},
    }
    fits = summary["fits"]
    gates = summary["acceptance"]
    if cfg.study in ("theorem2", "averaging", "gl-limit"):
        for diag in ("sup_diff", "res_p0", "res_p2", "sup_diff_gl"):
            med = _median_by_eps(records, diag)
            if not med:
                continue
            fit = _slope_fit(med)
            fits[diag] = {
                "medians": {f"{e:.10g}": m for e, m in med.items()},
                "slope": None if fit is None else fit.slope,
            }
        if cfg.study == "theorem2" and "sup_diff" in fits:
            slope = fits["sup_diff"]["slope"]
            gates["sup_diff_slope_in_window"] = (
                slope is not None and 0.7 <= slope <= 1.3
            )
        if cfg.study == "averaging":
            for diag in ("res_p0", "res_p2"):
                slope = fits.get(diag, {}).get("slope")
                gates[f"{diag}_slope_in_window"] = (
                    slope is not None and 0.7 <= slope <= 1.3
                )
    elif cfg.study == "attractivity":
        med = _median_by_eps(records, "offband_sup")
        fit = _slope_fit(med)
        ratios = [m / e for e, m in med.items()]
        fits["offband_sup"] = {
            "medians": {f"{e:.10g}": m for e, m in med.items()},
            "slope": None if fit is None else fit.slope,
            "ratio_spread": max(ratios) / min(ratios) if ratios else None,
        }
        gates["slope_in_window"] = fit is not None and 0.7 <= fit.slope <= 1.3
        gates["ratio_spread_below_2"] = bool(ratios) and max(ratios) / min(ratios) < 2.0
    elif cfg.study == "landau-sweep":
        sweep = {}
        for r in records:
            if r.status == "ok":
                sweep[r.params["nu"]] = r.diagnostics["c3"]
        fits["c3_by_nu"] = {f"{nu:.10g}": c for nu, c in sorted(sweep.items())}
        nus = sorted(sweep)
        crossing = None
        for a, b in zip(nus, nus[1:]):
            if sweep[a] < 0 <= sweep[b]:
                crossing = [a, b]
        fits["sign_change_bracket"] = crossing
        gates["sign_change_found"] = crossing is not None
    elif cfg.study == "quintic-suite":
        for r in records:
            if r.status != "ok":
                continue
            if r.params["nu2"] == 0.0 and r.params["nu3"] == 0.0:
                fits["c5_pure"] = r.diagnostics.get("c5")
            else:
                fits["c3_quadratic"] = r.diagnostics.get("c3")
    summary["ok"] = all(gates.values()) if gates else True
    return summary


# ---------------------------------------------------------------------------
# Orchestration


def run_study(cfg: StudyConfig, progress=None) -> dict:
    """Execute every pending cell, write records incrementally, summarize.

    Completed cells found in an existing ``records.csv`` are skipped, so a
    study interrupted between cells resumes where it stopped.  Returns the
    summary dict (also written to ``summary.json``).
    """
    cfg.validate()
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest_path = out / "manifest.json"
    manifest = {"version": __version__, "config": cfg.public_dict()}
    if manifest_path.exists():
        existing = json.loads(manifest_path.read_text())
        if existing["config"] != manifest["config"]:
            raise ConfigError(
                f"output directory {out} already holds a study with a "
                "different configuration"
            )
    else:
        manifest_path.write_text(json.dumps(manifest, indent=2))

    records_path = out / "records.csv"
    records = load_records(records_path)
    done = {r.key for r in records if r.status == "ok"}
    pending = [
        (params, seed)
        for params, seed in study_cells(cfg)
        if record_key(cfg.study, params, seed) not in done
    ]

    def finish(record: StudyRecord) -> None:
        append_record(records_path, record)
        records.append(record)
        if progress is not None:
            progress(record)

    if cfg.threads > 1 and len(pending) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            futures = [pool.submit(_run_cell, cfg, p, s) for p, s in pending]
            for future in as_completed(futures):
                finish(future.result())
    else:
        for params, seed in pending:
            finish(_run_cell(cfg, params, seed))

    summary = summarize(cfg, records)
    (out / "summary.json").write_text(json.dumps(summary, indent=2))
    return summary


def replay(out_dir, overrides: dict | None = None, limit: int | None = None) -> dict:
    """Re-run recorded cells and verify bit-identical diagnostics.

    ``overrides`` must be empty or match the recorded configuration; a
    changed parameter (for example a different dt) is a config mismatch.
    """
    out = Path(out_dir)
    manifest_path = out / "manifest.json"
    if not manifest_path.exists():
        raise ConfigError(f"no manifest.json under {out}")
    manifest = json.loads(manifest_path.read_text())
    if manifest["version"] != __version__:
        raise ReplayError(
            f"recorded version {manifest['version']} does not match "
            f"installed version {__version__}"
        )
    cfg = StudyConfig.from_public_dict(manifest["config"])
    if overrides:
        for key, value in overrides.items():
            if value is None:
                continue
            recorded = getattr(cfg, key)
            if recorded != value:
                raise ConfigError(
                    f"config mismatch on {key!r}: recorded {recorded}, "
                    f"requested {value}"
                )
    records = [r for r in load_records(out / "records.csv") if r.status == "ok"]
    if limit is not None:
        records = records[:limit]
    mismatches = []
    for record in records:
        fresh = _run_cell(cfg, record.params, record.seed)
        if fresh.diagnostics_repr() != record.diagnostics_repr():
            mismatches.append(record.key)
    return {
        "replayed": len(records),
        "mismatches": mismatches,
        "ok": not mismatches,
    }


# ---------------------------------------------------------------------------
# Plot data and config files


def emit_plotdata(out_dir) -> list:
    """Write tidy CSVs (slope data, coefficient sweeps) next to the records."""
    out = Path(out_dir)
    manifest = json.loads((out / "manifest.json").read_text())
    cfg = StudyConfig.from_public_dict(manifest["config"])
    records = load_records(out / "records.csv")
    summary = summarize(cfg, records)
    written = []
    for diag, fit in summary["fits"].items():
        if not isinstance(fit, dict) or "medians" not in fit:
            continue
        path = out / f"plot_slope_{diag}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["eps", "median", "log10_eps", "log10_median"])
            for eps_str, med in fit["medians"].items():
                eps = float(eps_str)
                writer.writerow(
                    [f"{eps:.10g}", f"{med:.10g}",
                     f"{np.log10(eps):.10g}", f"{np.log10(med):.10g}"]
                )
        written.append(path)
    if "c3_by_nu" in summary["fits"]:
        path = out / "plot_coefficients.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["nu", "c3"])
            for nu_str, c3 in summary["fits"]["c3_by_nu"].items():
                writer.writerow([nu_str, f"{c3:.10g}"])
        written.append(path)
    return written


def parse_config_file(path) -> dict:
    """Read a ``key = value`` config file ('#' starts a comment).

    Recognized keys mirror the CLI flags: study, eps (comma list), nu
    (comma list), nu2, nu3, seeds, out, threads, delta, dt, t_end,
    intensity, amplitude, offband, n_points, periods, base_seed.
    """
    values: dict = {}
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key = key.strip().replace("-", "_")
        val = val.strip()
        try:
            if key in ("eps", "nu"):
                values[f"{key}_list"] = tuple(float(x) for x in val.split(","))
            elif key in ("seeds", "n_seeds"):
                values["n_seeds"] = int(val)
            elif key in ("threads", "n_points", "periods", "base_seed"):
                values[key] = int(val)
            elif key in ("nu2", "nu3", "delta", "dt", "t_end",
                         "intensity", "amplitude", "offband"):
                values[key] = float(val)
            elif key in ("study", "out"):
                values[key] = val
            else:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from exc
    return values
