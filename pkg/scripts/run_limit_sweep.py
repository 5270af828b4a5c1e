"""Sweep the time horizon and track the ECF distance to the scaling limit.

Covers the three regimes: short-time inner-stable, long-time outer-stable,
and long-time Gaussian (outer index above two).  Writes one CSV per regime
with columns h, distance.

Usage: python scripts/run_limit_sweep.py --paths 4000 --out-dir out/
"""

import argparse
import os

import numpy as np

from layerlab import (GaussianCF, LayeredQ, SphericalMeasure, StableCF,
                      auto_r_cut, cf_distance, gaussian_covariance,
                      layered_terminals_gaussian)

REGIMES = {
    # name: (alpha, beta, sigma mass, h grid, limit index or "gauss")
    "short": (1.3, 1.9, 2.0, np.logspace(0, -4, 9), 1.3),
    "long_stable": (1.3, 1.9, 2.0, np.logspace(0, 4, 9), 1.9),
    "long_gauss": (1.1, 2.5, 1.0, np.logspace(0, 4, 9), "gauss"),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--paths", type=int, default=4000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", default="out")
    args = ap.parse_args()

    os.makedirs(args.out_dir, exist_ok=True)
    for name, (alpha, beta, mass, hs, limit) in REGIMES.items():
        sigma = SphericalMeasure.symmetric_pair(mass)
        q = LayeredQ.canonical(alpha, beta, mass)
        if limit == "gauss":
            target = GaussianCF(gaussian_covariance(q, sigma))
            index = 2.0
        else:
            target = StableCF(limit, sigma)
            index = limit
        rows = []
        for h in hs:
            x = layered_terminals_gaussian(alpha, beta, sigma, h,
                                           auto_r_cut(q, mass, h),
                                           args.paths, args.seed)
            rescaled = x * h ** (-1.0 / index)
            rows.append([h, cf_distance(rescaled, target)])
        out = os.path.join(args.out_dir, f"limit_{name}.csv")
        np.savetxt(out, np.array(rows), delimiter=",", header="h,distance",
                   comments="")
        print(f"{name}: distance {rows[0][1]:.4f} at h={rows[0][0]:g} -> "
              f"{rows[-1][1]:.4f} at h={rows[-1][0]:g} ({out})")


if __name__ == "__main__":
    main()
