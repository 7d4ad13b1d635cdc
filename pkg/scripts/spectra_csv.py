#!/usr/bin/env python3
"""Eigenvalues of A and of the preconditioned matrix for the three order pairs.

Produces plot-ready ``re,im`` CSV files, one pair per (beta, omega).
"""
import argparse
import pathlib

from fracinverse.cli import main as cli

ORDERS = [(0.1, 1.9), (0.5, 1.5), (0.9, 1.1)]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=50)
    ap.add_argument("--S", type=int, default=10)
    ap.add_argument("--outdir", default="results/spectra")
    args = ap.parse_args()
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for beta, omega in ORDERS:
        stem = outdir / f"b{beta}_w{omega}"
        cli(["spectrum", "--beta", str(beta), "--omega", str(omega), "--n", str(args.n),
             "--S", str(args.S), "--lambda", "5e-3", "--out", str(stem)])


if __name__ == "__main__":
    main()
