#!/usr/bin/env python3
"""Exact vs reconstructed source on the grid for several noise levels."""
import argparse
import pathlib

from fracinverse.cli import main as cli

# (eps, lambda): the middle lambda of each noise level
CASES = [(0.001, 1e-4), (0.01, 1e-3), (0.1, 1e-2)]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--beta", type=float, default=0.1)
    ap.add_argument("--omega", type=float, default=1.9)
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--outdir", default="results/profiles")
    args = ap.parse_args()
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for eps, lam in CASES:
        stem = outdir / f"eps{eps:g}_lam{lam:g}"
        code = cli(["solve", "--beta", str(args.beta), "--omega", str(args.omega),
                    "--n", str(args.n), "--S", str(args.n), "--eps", str(eps),
                    "--lambda", str(lam), "--seed", str(args.seed),
                    "--out", f"{stem}.json", "--recon-csv", f"{stem}.csv"])
        print(f"eps={eps:g} lambda={lam:g} -> {stem}.csv (exit {code})")


if __name__ == "__main__":
    main()
