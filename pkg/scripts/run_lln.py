"""Law of large numbers sweeps over the three regimes.

    python scripts/run_lln.py --replicas 200 --out results/lln
"""

import argparse
from pathlib import Path

from betalaguerre.experiments import RegimeSpec, run_lln


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--gamma", type=float, default=0.5)
    ap.add_argument("--replicas", type=int, default=200)
    ap.add_argument("--rmax", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/lln"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    regimes = {
        "fixed_beta": (RegimeSpec.fixed_beta(2.0, args.gamma, [100, 200, 400]), 0.03),
        "beta_n_to_infinity": (RegimeSpec.beta_n_to_infinity(args.gamma, [100, 200, 400]), 0.03),
        "high_temperature": (RegimeSpec.high_temperature(1.0, args.gamma, [250, 500, 1000]), 0.05),
    }
    for name, (regime, tol) in regimes.items():
        rep = run_lln(regime, r_max=args.rmax, replicas=args.replicas, master_seed=args.seed,
                      tol=tol, workers=args.workers)
        rep.to_csv(args.out / f"{name}.csv")
        print(rep.summary())


if __name__ == "__main__":
    main()
