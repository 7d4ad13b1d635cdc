#!/usr/bin/env python3
"""Condition numbers of the system with and without the block preconditioner.

Writes the sweep CSV and prints each cell next to its reference value.
"""
import argparse
import pathlib

from fracinverse.experiments import SweepConfig, run_sweep, write_csv
from reference_values import COND

ORDERS = [[0.1, 1.9], [0.5, 1.5], [0.9, 1.1]]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[16, 32])
    ap.add_argument("--S", type=int, nargs="+", default=[16, 32])
    ap.add_argument("--dense-cap", type=int, default=4096)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/condition_numbers.csv")
    args = ap.parse_args()

    cfg = SweepConfig.from_dict({"experiment": "cond", "orders": ORDERS, "n": args.n,
                                 "S": args.S, "lambda": [5e-3], "dense_cap": args.dense_cap})
    rows = run_sweep(cfg, workers=args.workers)
    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        write_csv(rows, "cond", fh)

    print(f"{'beta':>5} {'omega':>5} {'n':>4} {'S':>4} {'cond(A)':>12} {'ref':>10} "
          f"{'cond(PinvA)':>12} {'ref':>8}")
    for r in rows:
        if r.error:
            print(f"{r.beta:5} {r.omega:5} {r.n:4} {r.S:4}  {r.error}")
            continue
        ref = COND.get((r.beta, r.omega, r.n, r.S), (float("nan"),) * 2)
        print(f"{r.beta:5} {r.omega:5} {r.n:4} {r.S:4} {r.values['cond_unprec']:12.2f} "
              f"{ref[0]:10.2f} {r.values['cond_prec']:12.2f} {ref[1]:8.2f}")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
