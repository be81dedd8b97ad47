#!/usr/bin/env python3
"""Scaling of the off-band / band split of the linear stochastic convolution.

Samples the exact stochastic convolution at T = 1 across a ladder of
bandwidth parameters, computes the L2 ratio of the off-band part to the
carrier-band part per seed, and fits the log-log slope of the medians.

Usage: scripts/noise_split_scaling.py [--seeds N] [--points N]
"""
import argparse
import sys

import numpy as np

from shmod import (Grid, NoiseConfig, fit_scaling_exponent, make_kernel,
                   project, project_complement, stochastic_convolution_sample)

LADDER = (0.2, 0.14, 0.1, 0.07, 0.05)
DELTA = 0.125


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--points", type=int, default=2048)
    args = ap.parse_args()
    meds = []
    for eps in LADDER:
        grid = Grid.for_carrier(eps, args.points, periods=128)
        p1 = make_kernel("P1", DELTA, grid.eps, grid)
        ratios = []
        for s in range(args.seeds):
            w = stochastic_convolution_sample(grid, grid.eps, 1.0,
                                              NoiseConfig(seed=1000 + s))
            off = project_complement(w, p1).l2_norm()
            band = project(w, p1).l2_norm()
            ratios.append(off / band)
        med = float(np.median(ratios))
        meds.append((eps, med))
        print(f"eps={eps:<5} median off/band ratio = {med:.4f}", flush=True)
    fit = fit_scaling_exponent(meds)
    print(f"log-log slope = {fit.slope:.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
