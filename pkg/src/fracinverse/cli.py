"""Command-line harness: ``fracinverse {coeffs,spectrum,cond,solve,sweep}``.

Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure,
4 GMRES did not converge.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import json
import logging
import sys

import numpy as np

from .errors import DomainError, FracInverseError, ResourceError, SingularBlockError
from .experiments import (
    ConfigError,
    ExperimentConfig,
    SweepConfig,
    fmt,
    load_json,
    run_solve,
    run_sweep,
    write_csv,
)
from .spectra import EigensolverError, assemble_dense_system, eigenvalues_dense
from .symbol import symbol_coeffs
from .system import build_system, make_problem

log = logging.getLogger("fracinverse")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_NOCONV = 0, 2, 3, 4

# flag dest -> config key
_SCALARS = {
    "preset": "preset", "beta": "beta", "omega": "omega", "n": "n", "S": "S", "d": "d",
    "lam": "lam", "eps": "eps", "seed": "seed", "precond": "precond", "tol": "tol",
    "maxit": "maxit", "dense_cap": "dense_cap", "noise_mode": "noise_mode",
}


def _add_common(p, lists=False):
    nargs = "+" if lists else None
    p.add_argument("--config", help="JSON config file; explicit flags override it")
    p.add_argument("--preset", choices=["variable", "constant"])
    p.add_argument("--beta", type=float, nargs=nargs)
    p.add_argument("--omega", type=float, nargs=nargs)
    p.add_argument("--n", type=int, nargs=nargs)
    p.add_argument("--S", type=int, nargs=nargs)
    p.add_argument("--d", type=int, help="spatial dimension (default 1)")
    p.add_argument("--lambda", dest="lam", type=float, nargs=nargs)
    p.add_argument("--dense-cap", dest="dense_cap", type=int)
    p.add_argument("--out", help="output path")


def _add_solver(p):
    p.add_argument("--eps", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--noise-mode", dest="noise_mode", choices=["absolute", "relative"])
    p.add_argument("--precond", choices=["none", "block-tri", "block_tri"])
    p.add_argument("--tol", type=float)
    p.add_argument("--maxit", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracinverse", description="Experiments for the regularized fractional inverse source problem.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="dump symbol coefficients as CSV")
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, default=1, choices=[1, 2])
    p.add_argument("--out")

    p = sub.add_parser("spectrum", help="eigenvalues of A and P^-1 A")
    _add_common(p)

    p = sub.add_parser("cond", help="2-norm condition numbers over a sweep")
    _add_common(p, lists=True)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("solve", help="manufacture data, solve with GMRES, report")
    _add_common(p)
    _add_solver(p)
    p.add_argument("--recon-csv", help="write x, f_true, f_recon to this CSV")

    p = sub.add_parser("sweep", help="run a JSON-configured sweep (condition, iteration or reconstruction tables)")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--workers", type=int, default=1)
    return parser


def _experiment_config(args) -> ExperimentConfig:
    data = load_json(args.config) if getattr(args, "config", None) else {}
    data = ExperimentConfig.from_dict(data).to_dict()
    data["lam"] = data.pop("lambda")
    for dest, key in _SCALARS.items():
        val = getattr(args, dest, None)
        if val is not None:
            data[key] = val
    return ExperimentConfig(**data)


def _open_out(path):
    return open(path, "w", newline="") if path else contextlib.nullcontext(sys.stdout)


def cmd_coeffs(args) -> int:
    if not 1.0 < args.omega <= 2.0:
        raise DomainError(f"omega must lie in (1, 2], got {args.omega}")
    if args.n < 1:
        raise DomainError("n must be >= 1")
    sym = symbol_coeffs(args.omega, (args.n,) * args.d)
    ls = np.arange(-(args.n - 1), args.n)
    with _open_out(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        if args.d == 1:
            w.writerow(["l", "a_l"])
            for l in ls:
                w.writerow([int(l), fmt(sym.at(int(l)))])
        else:
            w.writerow(["l1", "l2", "a_l"])
            for l1 in ls:
                for l2 in ls:
                    w.writerow([int(l1), int(l2), fmt(sym.at(int(l1), int(l2)))])
    return EXIT_OK


def _write_eigs(path, eig):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["re", "im"])
        for z in eig:
            w.writerow([fmt(z.real), fmt(z.imag)])


def cmd_spectrum(args) -> int:
    cfg = _experiment_config(args)
    spec = make_problem(cfg.preset, beta=cfg.beta, omega=cfg.omega, n=(cfg.n,) * cfg.d,
                        S=cfg.S, lam=cfg.lam)
    op = build_system(spec)
    A = assemble_dense_system(op, "A", cfg.dense_cap)
    P = assemble_dense_system(op, "P", cfg.dense_cap)
    eig_a = eigenvalues_dense(A)
    eig_p = eigenvalues_dense(A, P)
    stem = args.out or "spectrum"
    _write_eigs(f"{stem}_A.csv", eig_a)
    _write_eigs(f"{stem}_PinvA.csv", eig_p)
    summary = {
        "dimension": int(op.dim),
        "files": [f"{stem}_A.csv", f"{stem}_PinvA.csv"],
        "cluster_count_1e-6": int(np.count_nonzero(np.abs(eig_p - 1) <= 1e-6)),
        "min_abs_eig_A": float(np.abs(eig_a).min()),
        "min_abs_eig_PinvA": float(np.abs(eig_p).min()),
    }
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def _pairs(betas, omegas):
    if len(betas) == len(omegas):
        return [[b, o] for b, o in zip(betas, omegas)]
    if len(betas) == 1:
        return [[betas[0], o] for o in omegas]
    if len(omegas) == 1:
        return [[b, omegas[0]] for b in betas]
    raise ConfigError("--beta and --omega lists must have equal length (they are paired)")


def cmd_cond(args) -> int:
    data = load_json(args.config) if args.config else {}
    data = dict(data, experiment="cond")
    if args.beta or args.omega:
        base = data.get("orders", [[0.1, 1.9]])
        betas = args.beta or [b for b, _ in base]
        omegas = args.omega or [o for _, o in base]
        data["orders"] = _pairs(betas, omegas)
    for dest, key in (("n", "n"), ("S", "S"), ("lam", "lambda")):
        if getattr(args, dest):
            data[key] = getattr(args, dest)
    if args.preset:
        data["preset"] = args.preset
    if args.d:
        data["d"] = args.d
    if args.dense_cap:
        data["dense_cap"] = args.dense_cap
    cfg = SweepConfig.from_dict(data)
    rows = run_sweep(cfg, workers=args.workers)
    with _open_out(args.out) as fh:
        write_csv(rows, "cond", fh)
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg = _experiment_config(args)
    report = run_solve(cfg)
    x, f_true, f_rec = report.pop("_arrays")
    with _open_out(args.out) as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    if args.recon_csv:
        with open(args.recon_csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            dcols = ["x"] if x.shape[1] == 1 else [f"x{i + 1}" for i in range(x.shape[1])]
            w.writerow(dcols + ["f_true", "f_recon"])
            for xi, a, b in zip(x, f_true, f_rec):
                w.writerow([fmt(v) for v in xi] + [fmt(a), fmt(b)])
    if not report["converged"]:
        log.warning("GMRES did not converge in %d iterations", report["iterations"])
        return EXIT_NOCONV
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = SweepConfig.from_dict(load_json(args.config))
    rows = run_sweep(cfg, workers=args.workers)
    with _open_out(args.out) as fh:
        write_csv(rows, cfg.experiment, fh)
    failed = [r for r in rows if r.error]
    if failed:
        log.warning("%d of %d rows reported errors", len(failed), len(rows))
    return EXIT_OK


COMMANDS = {
    "coeffs": cmd_coeffs,
    "spectrum": cmd_spectrum,
    "cond": cmd_cond,
    "solve": cmd_solve,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, DomainError, ResourceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SingularBlockError, EigensolverError, FracInverseError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
