"""Scaled variance of linear statistics along an N schedule.

    python scripts/run_clt.py --regime high_temperature --f x2 --replicas 4000
"""

import argparse
from pathlib import Path

from betalaguerre.cli import TEST_FUNCTIONS
from betalaguerre.experiments import RegimeSpec, run_clt


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--regime", choices=["fixed_beta", "high_temperature"], default="fixed_beta")
    ap.add_argument("--f", choices=sorted(TEST_FUNCTIONS), default="x")
    ap.add_argument("--gamma", type=float, default=0.5)
    ap.add_argument("--beta", type=float, default=2.0)
    ap.add_argument("--c", type=float, default=1.0)
    ap.add_argument("--schedule", default="100,200,400")
    ap.add_argument("--replicas", type=int, default=4000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/clt"))
    args = ap.parse_args()

    Ns = [int(s) for s in args.schedule.split(",")]
    if args.regime == "fixed_beta":
        regime = RegimeSpec.fixed_beta(args.beta, args.gamma, Ns)
    else:
        regime = RegimeSpec.high_temperature(args.c, args.gamma, Ns)
    f, fp = TEST_FUNCTIONS[args.f]
    # for f = x the limit is 2 gamma in every regime
    target = 2 * args.gamma if args.f == "x" else None
    rep = run_clt(f, fp, regime, replicas=args.replicas, master_seed=args.seed, target=target,
                  workers=args.workers)
    args.out.mkdir(parents=True, exist_ok=True)
    rep.to_csv(args.out / f"{args.regime}_{args.f}.csv")
    print(rep.summary())


if __name__ == "__main__":
    main()
