#!/usr/bin/env python3
"""Measure how fast off-band energy collapses onto the carrier band.

Starts each run from band-concentrated data plus an O(1) off-band
perturbation, records the post-transient sup norm of the off-band component,
and fits its scaling in the bandwidth parameter eps.

Usage: scripts/run_attractivity_study.py [OUT_DIR] [--seeds N]
"""
import argparse
import json
import sys

from shmod import StudyConfig, run_study


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", nargs="?", default="out/attractivity")
    ap.add_argument("--seeds", type=int, default=None)
    args = ap.parse_args()
    overrides = {}
    if args.seeds is not None:
        overrides["n_seeds"] = args.seeds
    cfg = StudyConfig.for_study("attractivity", out_dir=args.out, **overrides)
    summary = run_study(cfg, progress=lambda rec:
                        print(f"{rec.key}: {rec.status}", flush=True))
    print(json.dumps(summary["fits"], indent=2))
    return 0 if summary["ok"] else 3


if __name__ == "__main__":
    sys.exit(main())
