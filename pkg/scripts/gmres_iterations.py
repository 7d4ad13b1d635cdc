#!/usr/bin/env python3
"""GMRES iteration counts and wall times, unpreconditioned vs block preconditioned."""
import argparse
import pathlib

from fracinverse.experiments import SweepConfig, run_sweep, write_csv
from reference_values import ITERS

ORDERS = [[0.1, 1.9], [0.5, 1.5], [0.9, 1.1]]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[16, 32])
    ap.add_argument("--S", type=int, nargs="+", default=[16, 32])
    ap.add_argument("--eps", type=float, default=0.01)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--noise-mode", default="absolute", choices=["absolute", "relative"])
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/gmres_iterations.csv")
    args = ap.parse_args()

    cfg = SweepConfig.from_dict({
        "experiment": "gmres", "orders": ORDERS, "n": args.n, "S": args.S,
        "lambda": [5e-3], "eps": [args.eps], "seeds": [args.seed], "noise_mode": args.noise_mode,
    })
    rows = run_sweep(cfg, workers=args.workers)
    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        write_csv(rows, "gmres", fh)

    print(f"{'beta':>5} {'omega':>5} {'n':>4} {'S':>4} {'it':>6} {'ref':>5} {'it(P)':>6} "
          f"{'ref':>4} {'cpu':>8} {'cpu(P)':>8}")
    for r in rows:
        v = r.values
        ref = ITERS.get((r.beta, r.omega, r.n, r.S), ("-", "-"))
        print(f"{r.beta:5} {r.omega:5} {r.n:4} {r.S:4} {v['iters_unprec']:6} {ref[0]:>5} "
              f"{v['iters_prec']:6} {ref[1]:>4} {v['cpu_unprec']:8.3f} {v['cpu_prec']:8.3f}"
              + (f"  {r.error}" if r.error else ""))
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
