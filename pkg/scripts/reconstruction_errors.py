#!/usr/bin/env python3
"""Seed-averaged reconstruction error over the noise level / lambda grid.

For each noise level the middle lambda is expected to give the smallest error.
"""
import argparse
import pathlib

from fracinverse.experiments import SweepConfig, run_sweep, write_csv
from reference_values import NOISE_LAMBDA, RECON


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--beta", type=float, default=0.1)
    ap.add_argument("--omega", type=float, default=1.9)
    ap.add_argument("--n", type=int, nargs="+", default=[16, 32, 64])
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--noise-mode", default="absolute", choices=["absolute", "relative"])
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/reconstruction_errors.csv")
    args = ap.parse_args()

    rows = []
    for n in args.n:  # square grids, S = n
        cfg = SweepConfig.from_dict({
            "experiment": "recon", "orders": [[args.beta, args.omega]], "n": [n], "S": [n],
            "noise_lambda": [list(p) for p in NOISE_LAMBDA], "seeds": list(range(args.seeds)),
            "noise_mode": args.noise_mode,
        })
        rows += run_sweep(cfg, workers=args.workers)
    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        write_csv(rows, "recon", fh)

    by_n = {}
    for r in rows:
        by_n.setdefault(r.n, {})[(r.eps, r.lam)] = r.values["recon_error"]
    for n, cells in by_n.items():
        errs = [cells[p] for p in NOISE_LAMBDA]
        ref = RECON.get((n, n)) if (args.beta, args.omega) == (0.1, 1.9) else None
        print(f"n = S = {n}")
        for k in range(3):
            trio = errs[3 * k:3 * k + 3]
            lams = [f"{lam:g}" for _, lam in NOISE_LAMBDA[3 * k:3 * k + 3]]
            mark = "middle min" if trio[1] < min(trio[0], trio[2]) else "no middle min"
            line = f"  eps={NOISE_LAMBDA[3 * k][0]:<6} lambda {'/'.join(lams):<20} " \
                   + " ".join(f"{e:.4f}" for e in trio) + f"  [{mark}]"
            if ref:
                line += "  ref " + " ".join(f"{e:.4f}" for e in ref[3 * k:3 * k + 3])
            print(line)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
