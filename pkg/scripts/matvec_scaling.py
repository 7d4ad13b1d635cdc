#!/usr/bin/env python3
"""Wall time of the matrix-free product as the spatial grid doubles."""
import argparse
import time

import numpy as np

from fracinverse.system import apply_system, build_system, make_problem


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[2**10, 2**11, 2**12, 2**13, 2**14, 2**15])
    ap.add_argument("--S", type=int, default=4)
    ap.add_argument("--rounds", type=int, default=10)
    ap.add_argument("--calls", type=int, default=20)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    ops = {n: build_system(make_problem(beta=0.5, omega=1.5, n=n, S=args.S)) for n in args.n}
    ys = {n: rng.standard_normal(op.dim) for n, op in ops.items()}
    best = {n: np.inf for n in ops}
    for _ in range(args.rounds):  # interleaved so machine drift affects every size
        for n, op in ops.items():
            for _ in range(args.calls):
                t = time.perf_counter()
                apply_system(op, ys[n])
                best[n] = min(best[n], time.perf_counter() - t)
    prev = None
    for n in args.n:
        ratio = f"{best[n] / prev:.2f}" if prev else "-"
        print(f"n={n:7d}  best {best[n] * 1e3:8.3f} ms  ratio {ratio}")
        prev = best[n]


if __name__ == "__main__":
    main()
