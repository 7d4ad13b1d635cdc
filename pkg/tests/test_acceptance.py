"""Acceptance criteria, one test each.

Every test records a one-line PASS/FAIL verdict; the lines are printed in the
pytest terminal summary and also when this file is run as a script.
"""
import time

import numpy as np
import pytest

from fracinverse.krylov import gmres
from fracinverse.spectra import assemble_dense_system, eigenvalues_dense, numerical_rank
from fracinverse.symbol import symbol_coeffs_1d
from fracinverse.system import apply_system, build_system, make_problem
from fracinverse.experiments import cond_cell, gmres_cell, recon_cell
from conftest import ORDER_PAIRS
from oracles import coefficient_report, reference_matrix

VERDICTS = {}


def record(num, ok, detail):
    VERDICTS[num] = f"{'PASS' if ok else 'FAIL'} criterion {num}: {detail}"
    assert ok, VERDICTS[num]


# reference values, keyed by (beta, omega, n, S)
REF_COND = {
    (0.1, 1.9, 16, 16): (2021.13, 62.31), (0.5, 1.5, 16, 16): (731.46, 85.61),
    (0.9, 1.1, 16, 16): (1370.83, 108.14), (0.1, 1.9, 32, 16): (7656.42, 65.81),
    (0.5, 1.5, 32, 16): (1511.39, 97.70), (0.9, 1.1, 32, 16): (1687.82, 136.21),
}
REF_ITERS = {
    (0.1, 1.9, 16, 16): (174, 8), (0.1, 1.9, 16, 32): (257, 8),
    (0.1, 1.9, 32, 16): (320, 9), (0.1, 1.9, 32, 32): (475, 8),
    (0.5, 1.5, 16, 16): (117, 10), (0.5, 1.5, 16, 32): (146, 11),
    (0.5, 1.5, 32, 16): (181, 11), (0.5, 1.5, 32, 32): (217, 11),
    (0.9, 1.1, 16, 16): (112, 13), (0.9, 1.1, 16, 32): (154, 13),
    (0.9, 1.1, 32, 16): (151, 15), (0.9, 1.1, 32, 32): (199, 15),
}
# beta = 0.1, omega = 1.9, n = S = 64: eps -> ((lambda, error), ...)
REF_RECON = {
    0.001: ((1e-5, 0.0579), (1e-4, 0.0194), (1e-3, 0.0510)),
    0.01: ((1e-4, 0.1628), (1e-3, 0.0552), (1e-2, 0.2393)),
    0.1: ((1e-3, 0.5085), (1e-2, 0.3732), (1e-1, 0.6115)),
}


def test_criterion_1_coefficient_properties():
    t0 = time.perf_counter()
    reps = {w: coefficient_report(w, 256, symbol_coeffs_1d) for w in (1.1, 1.5, 1.9)}
    elapsed = time.perf_counter() - t0
    ok = all(
        r["signs"] and r["recursion_rel"] <= 1e-13 and r["closed_form_rel"] <= 1e-13
        and r["sums_positive"] and r["sums_decreasing"]
        and r["sigma"][2] < r["sigma"][1] < r["sigma"][0]
        for r in reps.values()
    ) and reps[1.5]["tail"] < 0.05 and elapsed < 1.0
    worst = max(max(r["recursion_rel"], r["closed_form_rel"]) for r in reps.values())
    record(1, ok, f"signs/recursion/partial sums at n=256, worst rel {worst:.1e}, "
                  f"tail ratio {reps[1.5]['tail']:.1e}, {elapsed:.2f}s")


def test_criterion_2_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    worst = 0.0
    for beta, omega in ORDER_PAIRS:
        for n, S in (((32,), 16), ((8, 8), 8)):
            op = build_system(make_problem(beta=beta, omega=omega, n=n, S=S))
            A = reference_matrix(op)
            for y in rng.standard_normal((100, op.dim)):
                ref = A @ y
                worst = max(worst, np.linalg.norm(apply_system(op, y) - ref) / np.linalg.norm(ref))
    elapsed = time.perf_counter() - t0
    record(2, worst <= 1e-12 and elapsed < 30,
           f"matrix-free vs dense, 100 vectors x 6 configs, max rel {worst:.1e}, {elapsed:.1f}s")


def test_criterion_3_preconditioner_structure():
    t0 = time.perf_counter()
    parts, ok = [], True
    for beta, omega in ORDER_PAIRS:
        op = build_system(make_problem(beta=beta, omega=omega, n=16, S=8))
        A = assemble_dense_system(op, "A")
        P = assemble_dense_system(op, "P")
        rank = numerical_rank(A.matrix - P.matrix)
        cluster = int(np.count_nonzero(np.abs(eigenvalues_dense(A, P) - 1) <= 1e-6))
        ok &= rank <= op.N and cluster >= op.S * op.N
        parts.append(f"rank {rank}/cluster {cluster}")
    elapsed = time.perf_counter() - t0
    record(3, ok and elapsed < 30, f"n=16 S=8 (need rank<=16, cluster>=128): {', '.join(parts)}, "
                                   f"{elapsed:.1f}s")


def test_criterion_4_condition_numbers():
    t0 = time.perf_counter()
    worst = 0.0
    for (beta, omega, n, S), ref in REF_COND.items():
        got = cond_cell("variable", beta, omega, n, S, 5e-3)
        for g, r in zip((got["cond_unprec"], got["cond_prec"]), ref):
            worst = max(worst, abs(g - r) / r)
    elapsed = time.perf_counter() - t0
    record(4, worst <= 0.05 and elapsed < 120,
           f"six condition-number cells, max rel deviation {worst:.1e}, {elapsed:.1f}s")


def test_criterion_5_gmres_iterations():
    t0 = time.perf_counter()
    worst_p, worst_u, bad = 0, 0.0, []
    for (beta, omega, n, S), (ref_u, ref_p) in REF_ITERS.items():
        got = gmres_cell("variable", beta, omega, n, S, 5e-3, 0.01, 0)
        dp = abs(got["iters_prec"] - ref_p)
        du = abs(got["iters_unprec"] - ref_u) / ref_u
        worst_p, worst_u = max(worst_p, dp), max(worst_u, du)
        if dp > 2 or du > 0.10 or not got["converged"]:
            bad.append((beta, omega, n, S))
    elapsed = time.perf_counter() - t0
    record(5, not bad and elapsed < 120,
           f"12 cells, max |d iters_prec| {worst_p}, max rel d iters_unprec {worst_u:.1%}, "
           f"{elapsed:.1f}s" + (f", off: {bad}" if bad else ""))


def test_criterion_6_reconstruction():
    t0 = time.perf_counter()
    # at lambda = 1e-8 the preconditioned residual overstates accuracy by ~1/lambda,
    # so this consistency run is solved to tol 1e-10; the default-tol value is shown
    crime = recon_cell("variable", 0.1, 1.9, 64, 64, 1e-8, 0.0, [0], tol=1e-10)["recon_error"]
    loose = recon_cell("variable", 0.1, 1.9, 64, 64, 1e-8, 0.0, [0])["recon_error"]
    ok = crime <= 1e-3
    notes = [f"inverse crime {crime:.1e} at tol 1e-10 ({loose:.1e} at tol 1e-8)"]
    for eps, cells in REF_RECON.items():
        errs = [recon_cell("variable", 0.1, 1.9, 64, 64, lam, eps, range(5))["recon_error"]
                for lam, _ in cells]
        ratios = [e / ref for e, (_, ref) in zip(errs, cells)]
        middle_min = errs[1] < errs[0] and errs[1] < errs[2]
        within = all(0.5 <= r <= 2.0 for r in ratios)
        ok &= middle_min and within
        notes.append(f"eps={eps}: " + "/".join(f"{e:.4f}" for e in errs)
                     + ("" if middle_min else " (no middle min)")
                     + ("" if within else " (outside factor 2)"))
    elapsed = time.perf_counter() - t0
    record(6, ok and elapsed < 300, "; ".join(notes) + f", {elapsed:.1f}s")


def test_criterion_7_gmres_units():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    b = rng.standard_normal(50)
    _, rep = gmres(np.eye(50), b)
    ok = rep.iterations == 1 and rep.converged
    for k in (1, 2, 3, 5, 8):
        d = rng.permutation(np.repeat(np.linspace(1.0, 20.0, k), 60 // k + 1)[:60])
        _, rep = gmres(np.diag(d), rng.standard_normal(60), tol=1e-10)
        ok &= rep.converged and rep.iterations <= k
    for _ in range(20):
        n = int(rng.integers(5, 101))
        A = rng.standard_normal((n, n)) + np.sqrt(n) * np.eye(n)
        _, rep = gmres(A, rng.standard_normal(n), tol=1e-10)
        h = np.asarray(rep.residual_history)
        ok &= bool(np.all(np.diff(h) <= 1e-12 * h[0]))
    elapsed = time.perf_counter() - t0
    record(7, ok and elapsed < 10, f"identity, k-distinct diagonals, 20 monotone histories, "
                                   f"{elapsed:.2f}s")


def _best_times(ops, vectors, rounds=10, calls=20):
    # interleave sizes so slow drifts in machine state hit all of them alike
    best = {n: np.inf for n in ops}
    for _ in range(rounds):
        for n, op in ops.items():
            for _ in range(calls):
                t = time.perf_counter()
                apply_system(op, vectors[n])
                best[n] = min(best[n], time.perf_counter() - t)
    return best


def test_criterion_8_scaling():
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    sizes = (2**12, 2**13, 2**14)
    ops = {n: build_system(make_problem(beta=0.5, omega=1.5, n=n, S=4)) for n in sizes}
    times = _best_times(ops, {n: rng.standard_normal(op.dim) for n, op in ops.items()})
    ratios = [times[2 * n] / times[n] for n in sizes[:2]]
    elapsed = time.perf_counter() - t0
    record(8, max(ratios) <= 2.6 and elapsed < 60,
           "time(2n)/time(n) = " + ", ".join(f"{r:.2f}" for r in ratios) + f", {elapsed:.1f}s")


if __name__ == "__main__":
    import sys

    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
    for k in sorted(VERDICTS):
        print(VERDICTS[k])
    sys.exit(0 if all(v.startswith("PASS") for v in VERDICTS.values()) else 1)
