"""Radon-Nikodym diagnostics: weight normalization and importance sampling.

Prints a small table of E[e^{U'_T}] and E[e^{-U''_T}] (both should be 1)
and cross-validates an importance-sampled exceedance probability against a
direct estimate.

Usage: python scripts/run_rn_diagnostics.py --paths 4000
"""

import argparse

import numpy as np

from layerlab import (SphericalMeasure, draw_shot_noise,
                      layered_path_canonical, make_grid, stable_path,
                      substream, u_series)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--alpha", type=float, default=1.3)
    ap.add_argument("--beta", type=float, default=1.9)
    ap.add_argument("--paths", type=int, default=4000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--level", type=float, default=3.0)
    ap.add_argument("--gamma-cap", type=float, default=2000.0)
    args = ap.parse_args()

    alpha, beta = args.alpha, args.beta
    sigma = SphericalMeasure.symmetric_pair(2.0)
    m = sigma.total_mass()
    grid = make_grid(1.0, 200)
    n = args.paths

    w_p = np.empty(n)
    w_d = np.empty(n)
    rw = np.empty(n)
    direct = np.empty(n)
    for i in range(n):
        draw = draw_shot_noise(substream(args.seed, i), 1.0, sigma,
                               args.gamma_cap)
        w_p[i] = np.exp(u_series(draw, alpha, beta, m, 1.0, "prime"))
        w_d[i] = np.exp(-u_series(draw, alpha, beta, m, 1.0, "doubleprime"))
        y = stable_path(alpha, sigma, draw, grid)
        rw[i] = w_p[i] * float(np.max(np.abs(y.values)) > args.level)
        draw2 = draw_shot_noise(substream(args.seed + 10 ** 6, i), 1.0,
                                sigma, args.gamma_cap)
        x = layered_path_canonical(alpha, beta, sigma, draw2, grid)
        direct[i] = float(np.max(np.abs(x.values)) > args.level)

    def line(label, v):
        mean = np.mean(v)
        se = np.std(v, ddof=1) / np.sqrt(n)
        print(f"{label:34s} {mean:10.5f} +- {se:.5f}")

    print(f"(alpha, beta) = ({alpha}, {beta}), {n} paths")
    line("E[exp(U'_1)]   (should be 1)", w_p)
    line("E[exp(-U''_1)] (should be 1)", w_d)
    line(f"P(sup|X| > {args.level}) reweighted", rw)
    line(f"P(sup|X| > {args.level}) direct", direct)


if __name__ == "__main__":
    main()
