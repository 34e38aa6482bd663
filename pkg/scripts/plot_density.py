"""Histogram of sampled eigenvalues against the limiting density, as SVG.

    python scripts/plot_density.py --regime high_temperature --n 400 --c 1
"""

import argparse
from pathlib import Path

import numpy as np

from betalaguerre.experiments import simulate
from betalaguerre.laws import MpLaw, NuLaw, mp_density, nu_density
from betalaguerre.plotting import density_overlay_svg
from betalaguerre.tridiag import EnsembleParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--regime", choices=["fixed_beta", "high_temperature"], default="fixed_beta")
    ap.add_argument("--n", type=int, default=400)
    ap.add_argument("--gamma", type=float, default=0.5)
    ap.add_argument("--beta", type=float, default=2.0)
    ap.add_argument("--c", type=float, default=1.0)
    ap.add_argument("--replicas", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("results/density.svg"))
    args = ap.parse_args()

    M = args.n / args.gamma
    if args.regime == "fixed_beta":
        p = EnsembleParams(args.n, M, args.beta)
        law = MpLaw(args.gamma)
        density = lambda x: mp_density(law, x)  # noqa: E731
        hi = (1 + np.sqrt(args.gamma)) ** 2 * 1.05
        title = f"Marchenko-Pastur, gamma = {args.gamma}, beta = {args.beta}, N = {args.n}"
    else:
        p = EnsembleParams(args.n, M, 2 * args.c / args.n)
        law = NuLaw(args.gamma, args.c)
        density = lambda x: nu_density(law, x)  # noqa: E731
        hi = 8.0 * (1 + args.gamma)
        title = f"high temperature, gamma = {args.gamma}, c = {args.c}, N = {args.n}"
    eig = simulate(p, args.replicas, args.seed).eigenvalues
    grid = np.linspace(1e-4, hi, 600)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    sup = density_overlay_svg(args.out, eig, density, grid, title)
    print(f"wrote {args.out}; sup |histogram - density| = {sup:.4g}")


if __name__ == "__main__":
    main()
