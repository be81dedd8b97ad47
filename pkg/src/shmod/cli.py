"""Command-line interface.

Subcommands: simulate-sh, simulate-gl, study, replay, spectrum, plotdata.
Exit codes: 0 success, 2 configuration error, 3 study gate failure.
The default output root is the SHMOD_OUT environment variable (falling
back to the current directory).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from .grid import Grid, RealField, write_field, read_field
from .noise import NoiseConfig
from .sh import CUBIC, QUINTIC, ModelParams, simulate, modulated_carrier_ic
from .bands import DEFAULT_DELTA, make_kernel, kernel_dump_csv, demodulate, project
from .reduced import gl_coefficients, gl5_coefficients, simulate_gl
from .studies import (
    ConfigError,
    ReplayError,
    StudyConfig,
    STUDY_NAMES,
    emit_plotdata,
    parse_config_file,
    replay,
    run_study,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GATE = 3


def _output_root() -> Path:
    return Path(os.environ.get("SHMOD_OUT", "."))


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--eps", type=str, default=None,
                        help="epsilon value, or comma list for studies")
    parser.add_argument("--nu", type=str, default=None,
                        help="quadratic coefficient, or comma list for sweeps")
    parser.add_argument("--nu2", type=float, default=None,
                        help="quintic-case quadratic coefficient")
    parser.add_argument("--nu3", type=float, default=None,
                        help="quintic-case cubic coefficient")
    parser.add_argument("--delta", type=float, default=None,
                        help="band half-width parameter")
    parser.add_argument("--dt", type=float, default=None, help="time step")
    parser.add_argument("--t-end", type=float, default=None,
                        help="horizon on the slow time scale")
    parser.add_argument("--out", type=str, default=None, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shmod",
        description="Pseudospectral laboratory for the stochastic "
                    "Swift-Hohenberg equation and its amplitude reduction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate-sh", help="run one rescaled trajectory")
    _add_common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--intensity", type=float, default=1.0)
    p.add_argument("--amplitude", type=float, default=0.5)
    p.add_argument("--offband", type=float, default=0.0)
    p.add_argument("--n", type=int, default=2048, help="grid points")
    p.add_argument("--periods", type=int, default=None,
                   help="carrier periods across the domain")
    p.add_argument("--quintic", action="store_true",
                   help="use the quintic-nonlinearity variant")

    p = sub.add_parser("simulate-gl", help="run one amplitude-equation trajectory")
    _add_common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--intensity", type=float, default=1.0)
    p.add_argument("--amplitude", type=float, default=0.5)
    p.add_argument("--n", type=int, default=2048)
    p.add_argument("--periods", type=int, default=None)
    p.add_argument("--quintic", action="store_true")

    p = sub.add_parser("study", help="run a seeded ensemble study")
    _add_common(p)
    p.add_argument("--study", type=str, default=None, choices=STUDY_NAMES)
    p.add_argument("--config", type=str, default=None,
                   help="key = value config file; flags override it")
    p.add_argument("--seeds", type=int, default=None, help="seeds per cell")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--intensity", type=float, default=None)
    p.add_argument("--amplitude", type=float, default=None)
    p.add_argument("--n", type=int, default=None, dest="n_points")
    p.add_argument("--periods", type=int, default=None)
    p.add_argument("--base-seed", type=int, default=None)

    p = sub.add_parser("replay", help="re-run recorded cells bit-exactly")
    p.add_argument("--out", type=str, required=True, help="study directory")
    p.add_argument("--limit", type=int, default=None,
                   help="replay at most this many records")
    p.add_argument("--dt", type=float, default=None,
                   help="must match the recorded dt (mismatch is an error)")
    p.add_argument("--t-end", type=float, default=None)

    p = sub.add_parser("spectrum", help="dump |Fourier transform| of a field file")
    p.add_argument("--field", type=str, required=True, help="binary field file")
    p.add_argument("--out", type=str, default=None, help="CSV path")

    p = sub.add_parser("plotdata", help="emit tidy CSVs from a study directory")
    p.add_argument("--out", type=str, required=True, help="study directory")

    return parser


def _parse_float_list(text: str | None):
    if text is None:
        return None
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad numeric list {text!r}") from exc


def _resolve_out(arg: str | None, default_name: str) -> Path:
    if arg is not None:
        return Path(arg)
    return _output_root() / default_name


def _cmd_simulate_sh(args) -> int:
    eps_list = _parse_float_list(args.eps) or (0.1,)
    nu_list = _parse_float_list(args.nu) or (0.5,)
    eps, nu = eps_list[0], nu_list[0]
    grid = Grid.for_carrier(eps, args.n, periods=args.periods)
    delta = args.delta if args.delta is not None else DEFAULT_DELTA
    variant = QUINTIC if args.quintic else CUBIC
    params = ModelParams(
        variant, eps=grid.eps, nu=nu,
        nu2=args.nu2 if args.nu2 is not None else 1.0,
        nu3=args.nu3 if args.nu3 is not None else 0.0,
        dt=args.dt if args.dt is not None else 1e-3,
        t_end=args.t_end if args.t_end is not None else 1.0,
    )
    ncfg = NoiseConfig(seed=args.seed, intensity=args.intensity)
    v0 = modulated_carrier_ic(grid, grid.eps, ncfg.substream(1).make_rng(),
                              amplitude=args.amplitude, delta=delta,
                              offband=args.offband)
    traj = simulate(v0, params, ncfg, snapshot_stride=10)
    out = _resolve_out(args.out, "simulate-sh")
    out.mkdir(parents=True, exist_ok=True)
    write_field(out / "final.field", traj.final)
    for which in ("P0", "P1", "P2"):
        kernel_dump_csv(make_kernel(which, delta, grid.eps, grid), grid,
                        out / f"kernel_{which}.csv")
    print(f"status={traj.status} T={traj.times[-1]:.6g} "
          f"sup={traj.final.sup_norm():.6g} out={out}")
    return EXIT_OK


def _cmd_simulate_gl(args) -> int:
    eps_list = _parse_float_list(args.eps) or (0.1,)
    nu_list = _parse_float_list(args.nu) or (0.5,)
    eps, nu = eps_list[0], nu_list[0]
    grid = Grid.for_carrier(eps, args.n, periods=args.periods)
    delta = args.delta if args.delta is not None else DEFAULT_DELTA
    if args.quintic:
        coeffs = gl5_coefficients(
            args.nu2 if args.nu2 is not None else 1.0,
            args.nu3 if args.nu3 is not None else 0.0,
            noise_intensity=args.intensity,
        )
    else:
        coeffs = gl_coefficients(nu, noise_intensity=args.intensity)
    ncfg = NoiseConfig(seed=args.seed, intensity=args.intensity)
    v0 = modulated_carrier_ic(grid, grid.eps, ncfg.substream(1).make_rng(),
                              amplitude=args.amplitude, delta=delta)
    a0 = demodulate(project(v0, make_kernel("P1", delta, grid.eps, grid)),
                    grid.eps, delta)
    traj = simulate_gl(
        a0, coeffs,
        dt=args.dt if args.dt is not None else 1e-3,
        t_end=args.t_end if args.t_end is not None else 1.0,
        cfg=ncfg,
        snapshot_stride=10,
    )
    out = _resolve_out(args.out, "simulate-gl")
    out.mkdir(parents=True, exist_ok=True)
    write_field(out / "final.field", traj.final)
    print(f"status={traj.status} T={traj.times[-1]:.6g} "
          f"sup={traj.final.sup_norm():.6g} out={out}")
    return EXIT_OK


def _cmd_study(args) -> int:
    overrides: dict = {}
    if args.config is not None:
        overrides.update(parse_config_file(args.config))
    study = args.study or overrides.pop("study", None)
    if study is None:
        raise ConfigError("no study selected (use --study or a config file)")
    out = args.out or overrides.pop("out", None)
    out = Path(out) if out is not None else _output_root() / study
    flag_overrides = {
        "eps_list": _parse_float_list(args.eps),
        "nu_list": _parse_float_list(args.nu),
        "nu2": args.nu2,
        "nu3": args.nu3,
        "n_seeds": args.seeds,
        "threads": args.threads,
        "delta": args.delta,
        "dt": args.dt,
        "t_end": args.t_end,
        "intensity": args.intensity,
        "amplitude": args.amplitude,
        "n_points": args.n_points,
        "periods": args.periods,
        "base_seed": args.base_seed,
    }
    overrides.update({k: v for k, v in flag_overrides.items() if v is not None})
    cfg = StudyConfig.for_study(study, out, **overrides)

    total = {"done": 0}

    def progress(record):
        total["done"] += 1
        print(f"[{total['done']}] {record.key}: {record.status}", flush=True)

    summary = run_study(cfg, progress=progress)
    print(json.dumps(summary["fits"], indent=2))
    if not summary["ok"]:
        print(f"study gates failed: {summary['acceptance']}", file=sys.stderr)
        return EXIT_GATE
    return EXIT_OK


def _cmd_replay(args) -> int:
    overrides = {"dt": args.dt, "t_end": args.t_end}
    report = replay(args.out, overrides=overrides, limit=args.limit)
    print(f"replayed={report['replayed']} mismatches={len(report['mismatches'])}")
    for key in report["mismatches"]:
        print(f"  mismatch: {key}", file=sys.stderr)
    return EXIT_OK if report["ok"] else EXIT_GATE


def _cmd_spectrum(args) -> int:
    field = read_field(args.field)
    spec = field.full_spectrum() / field.grid.n_points
    k = np.fft.fftfreq(field.grid.n_points, d=field.grid.dx) * 2.0 * np.pi
    order = np.argsort(k)
    out = Path(args.out) if args.out else Path(args.field).with_suffix(".spectrum.csv")
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "abs_fourier"])
        for idx in order:
            writer.writerow([f"{k[idx]:.10g}", f"{abs(spec[idx]):.10g}"])
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_plotdata(args) -> int:
    written = emit_plotdata(args.out)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


_COMMANDS = {
    "simulate-sh": _cmd_simulate_sh,
    "simulate-gl": _cmd_simulate_gl,
    "study": _cmd_study,
    "replay": _cmd_replay,
    "spectrum": _cmd_spectrum,
    "plotdata": _cmd_plotdata,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ReplayError as exc:
        print(f"replay error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
