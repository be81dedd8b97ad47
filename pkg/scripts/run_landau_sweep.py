#!/usr/bin/env python3
"""Sweep the quadratic coupling nu and fit the effective cubic coefficient.

The fitted coefficient -(3 - 38/9 nu^2) changes sign at nu = sqrt(27/38);
the sweep reports the measured values and the bracketing interval.

Usage: scripts/run_landau_sweep.py [OUT_DIR] [--nu 0.0,0.5,0.8,0.89,1.0]
"""
import argparse
import json
import sys

from shmod import StudyConfig, run_study


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", nargs="?", default="out/landau")
    ap.add_argument("--nu", default=None,
                    help="comma-separated coupling values")
    args = ap.parse_args()
    overrides = {}
    if args.nu is not None:
        overrides["nu_list"] = tuple(float(x) for x in args.nu.split(","))
    cfg = StudyConfig.for_study("landau-sweep", out_dir=args.out, **overrides)
    summary = run_study(cfg, progress=lambda rec:
                        print(f"{rec.key}: {rec.status}", flush=True))
    print(json.dumps(summary["fits"], indent=2))
    return 0 if summary["ok"] else 3


if __name__ == "__main__":
    sys.exit(main())
