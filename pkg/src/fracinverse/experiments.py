"""Experiment orchestration: configs, table rows, sweeps and CSV output."""
from __future__ import annotations

import csv
import dataclasses
import io
import itertools
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import FracInverseError
from .krylov import gmres, precond_build
from .spectra import assemble_dense_system, condition_number_2
from .symbol import DEFAULT_DENSE_CAP
from .system import (
    PRESETS,
    add_noise,
    build_rhs,
    build_system,
    extract_reconstruction,
    forward_solve,
    make_problem,
    relative_error,
)

PRECOND_CHOICES = ("none", "block_tri")
EXPERIMENTS = ("cond", "gmres", "recon")
NOISE_MODES = ("absolute", "relative")


class ConfigError(FracInverseError, ValueError):
    """Invalid experiment configuration."""


def fmt(v) -> str:
    """CSV cell text; floats keep 17 significant digits."""
    if isinstance(v, (float, np.floating)):
        return format(float(v) + 0.0, ".17g")
    return str(v)


def _grid_n(n, d):
    return (int(n),) * int(d)


@dataclass
class ExperimentConfig:
    preset: str = "variable"
    beta: float = 0.1
    omega: float = 1.9
    n: int = 16
    S: int = 16
    d: int = 1
    T: float = 1.0
    lam: float = 5e-3
    eps: float = 0.01
    seed: int = 0
    noise_mode: str = "absolute"
    precond: str = "block_tri"
    tol: float = 1e-8
    maxit: int | None = None
    dense_cap: int = DEFAULT_DENSE_CAP

    def __post_init__(self):
        self.precond = str(self.precond).replace("-", "_")
        if self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}")
        if self.precond not in PRECOND_CHOICES:
            raise ConfigError(f"precond must be one of {PRECOND_CHOICES}")
        if self.noise_mode not in NOISE_MODES:
            raise ConfigError(f"noise_mode must be one of {NOISE_MODES}")
        if not 0 < self.beta < 1:
            raise ConfigError(f"beta must lie in (0, 1), got {self.beta}")
        if not 1 < self.omega < 2:
            raise ConfigError(f"omega must lie in (1, 2), got {self.omega}")
        if self.n < 1 or self.S < 1 or self.d < 1:
            raise ConfigError("n, S and d must be positive")
        if not self.lam > 0:
            raise ConfigError("lambda must be positive")
        if self.eps < 0:
            raise ConfigError("eps must be >= 0")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")
        if self.maxit is not None and self.maxit < 1:
            raise ConfigError("maxit must be >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        if "lambda" in data:
            data["lam"] = data.pop("lambda")
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["lambda"] = out.pop("lam")
        return out


@dataclass
class SweepConfig:
    """Grid for ``cond``/``gmres``/``recon`` sweeps.

    ``orders`` lists ``(beta, omega)`` pairs. ``noise_lambda`` optionally lists
    explicit ``(eps, lambda)`` cells; otherwise ``eps`` and ``lambda`` are crossed.
    """

    experiment: str = "gmres"
    preset: str = "variable"
    orders: list = field(default_factory=lambda: [[0.1, 1.9]])
    n: list = field(default_factory=lambda: [16])
    S: list = field(default_factory=lambda: [16])
    d: int = 1
    T: float = 1.0
    lam: list = field(default_factory=lambda: [5e-3])
    eps: list = field(default_factory=lambda: [0.01])
    noise_lambda: list | None = None
    seeds: list = field(default_factory=lambda: [0])
    noise_mode: str = "absolute"
    tol: float = 1e-8
    maxit: int | None = None
    dense_cap: int = DEFAULT_DENSE_CAP

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}")
        if self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}")
        for name in ("orders", "n", "S", "seeds"):
            val = getattr(self, name)
            if not isinstance(val, (list, tuple)) or len(val) == 0:
                raise ConfigError(f"sweep list {name!r} must be a non-empty list")
        if self.noise_lambda is None:
            for name in ("lam", "eps"):
                val = getattr(self, name)
                if not isinstance(val, (list, tuple)) or len(val) == 0:
                    raise ConfigError(f"sweep list {name!r} must be a non-empty list")
        elif len(self.noise_lambda) == 0:
            raise ConfigError("noise_lambda must be non-empty when given")
        for pair in self.orders:
            if len(pair) != 2 or not 0 < pair[0] < 1 or not 1 < pair[1] < 2:
                raise ConfigError(f"invalid (beta, omega) pair {pair}")

    @classmethod
    def from_dict(cls, data: dict) -> "SweepConfig":
        data = dict(data)
        if "lambda" in data:
            data["lam"] = data.pop("lambda")
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for k in ("n", "S", "lam", "eps", "seeds"):
            if k in data and not isinstance(data[k], (list, tuple)):
                data[k] = [data[k]]
        return cls(**data)

    def cells(self) -> list[tuple]:
        """``(beta, omega, n, S, eps, lam)`` tuples in deterministic order."""
        if self.noise_lambda is not None:
            el = [(float(e), float(l)) for e, l in self.noise_lambda]
        else:
            el = [(float(e), float(l)) for e, l in itertools.product(self.eps, self.lam)]
        if self.experiment == "cond":
            el = [(0.0, l) for l in dict.fromkeys(l for _, l in el)]
        out = []
        for (beta, omega), n, S in itertools.product(self.orders, self.n, self.S):
            for eps, lam in el:
                out.append((float(beta), float(omega), int(n), int(S), eps, lam))
        return out


TABLE_KEYS = ("beta", "omega", "n", "S", "lambda", "eps", "seeds")
MEASURES = {
    "cond": ("cond_unprec", "cond_prec"),
    "gmres": ("iters_unprec", "iters_prec", "cpu_unprec", "cpu_prec"),
    "recon": ("recon_error", "recon_error_std", "iters_prec"),
}
TIMING_COLUMNS = ("cpu_unprec", "cpu_prec")


@dataclass
class TableRow:
    beta: float
    omega: float
    n: int
    S: int
    lam: float
    eps: float
    seeds: tuple = (0,)
    values: dict = field(default_factory=dict)
    error: str = ""

    def cells(self, experiment: str) -> list[str]:
        keys = [self.beta, self.omega, self.n, self.S, self.lam, self.eps,
                ";".join(str(s) for s in self.seeds)]
        meas = [fmt(self.values[m]) if m in self.values else "" for m in MEASURES[experiment]]
        return [fmt(k) for k in keys] + meas + [self.error]


def header(experiment: str) -> list[str]:
    return list(TABLE_KEYS) + list(MEASURES[experiment]) + ["error"]


def write_csv(rows: Sequence[TableRow], experiment: str, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header(experiment))
    for r in rows:
        w.writerow(r.cells(experiment))


def rows_to_csv(rows: Sequence[TableRow], experiment: str) -> str:
    buf = io.StringIO()
    write_csv(rows, experiment, buf)
    return buf.getvalue()


def read_csv(text: str) -> tuple[str, list[TableRow]]:
    """Parse a table CSV back into rows; returns ``(experiment, rows)``."""
    reader = csv.reader(io.StringIO(text))
    head = next(reader)
    experiment = next(k for k, m in MEASURES.items() if head == header(k))
    rows = []
    for rec in reader:
        beta, omega, n, S, lam, eps, seeds = rec[:7]
        values = {}
        for name, cell in zip(MEASURES[experiment], rec[7:-1]):
            if cell != "":
                values[name] = int(cell) if name.startswith("iters") else float(cell)
        rows.append(TableRow(float(beta), float(omega), int(n), int(S), float(lam), float(eps),
                             tuple(int(s) for s in seeds.split(";")), values, rec[-1]))
    return experiment, rows


# -- pipeline pieces --------------------------------------------------------

@lru_cache(maxsize=16)
def _base_problem(preset, beta, omega, n, S, d, T):
    """Operator at a placeholder lambda plus the noise-free final data ``mu``."""
    spec = make_problem(preset, beta=beta, omega=omega, n=_grid_n(n, d), S=S, lam=1.0, T=T)
    op = build_system(spec)
    _, mu = forward_solve(op)
    return op, mu


def manufacture(preset, beta, omega, n, S, lam, *, d=1, T=1.0):
    """System operator for ``lam`` and final-time data from the exact source."""
    op, mu = _base_problem(preset, float(beta), float(omega), int(n), int(S), int(d), float(T))
    return op.with_lambda(lam), mu.copy()


def solve_one(op, mu_eps, precond: str, *, tol=1e-8, maxit=None, dense_cap=DEFAULT_DENSE_CAP):
    """Assemble the RHS, optionally precondition, and run GMRES."""
    z = build_rhs(op.spec, op.diags, mu_eps)
    t0 = time.perf_counter()
    P = precond_build(op, dense_cap=dense_cap) if precond == "block_tri" else None
    y, report = gmres(op, z, P, tol=tol, maxit=maxit)
    report.wall_time_seconds = time.perf_counter() - t0
    return y, report


def run_solve(cfg: ExperimentConfig) -> dict:
    """Full pipeline for one configuration; returns the JSON report dict.

    The report also carries ``x``, ``f_true`` and ``f_recon`` arrays under
    ``"_arrays"`` for optional CSV output (not serialized).
    """
    op, mu = manufacture(cfg.preset, cfg.beta, cfg.omega, cfg.n, cfg.S, cfg.lam, d=cfg.d, T=cfg.T)
    mu_eps = add_noise(mu, cfg.eps, cfg.seed, mode=cfg.noise_mode)
    y, report = solve_one(op, mu_eps, cfg.precond, tol=cfg.tol, maxit=cfg.maxit,
                          dense_cap=cfg.dense_cap)
    f_rec = extract_reconstruction(op, y)
    f_true = op.spec.f_true
    out = report.to_dict()
    out["recon_error"] = relative_error(f_true, f_rec)
    out["config"] = cfg.to_dict()
    out["_arrays"] = (op.spec.sgrid.points(), f_true, f_rec)
    return out


def cond_cell(preset, beta, omega, n, S, lam, *, d=1, T=1.0, dense_cap=DEFAULT_DENSE_CAP):
    # forward data is not needed for condition numbers
    spec = make_problem(preset, beta=beta, omega=omega, n=_grid_n(n, d), S=S, lam=lam, T=T)
    op = build_system(spec)
    A = assemble_dense_system(op, "A", dense_cap)
    P = assemble_dense_system(op, "P", dense_cap)
    return {"cond_unprec": condition_number_2(A), "cond_prec": condition_number_2(A, P)}


def gmres_cell(preset, beta, omega, n, S, lam, eps, seed, *, d=1, T=1.0, tol=1e-8,
               maxit=None, noise_mode="absolute", dense_cap=DEFAULT_DENSE_CAP):
    op, mu = manufacture(preset, beta, omega, n, S, lam, d=d, T=T)
    mu_eps = add_noise(mu, eps, seed, mode=noise_mode)
    _, r0 = solve_one(op, mu_eps, "none", tol=tol, maxit=maxit, dense_cap=dense_cap)
    _, r1 = solve_one(op, mu_eps, "block_tri", tol=tol, maxit=maxit, dense_cap=dense_cap)
    return {
        "iters_unprec": r0.iterations,
        "iters_prec": r1.iterations,
        "cpu_unprec": r0.wall_time_seconds,
        "cpu_prec": r1.wall_time_seconds,
        "converged": r0.converged and r1.converged,
    }


def recon_cell(preset, beta, omega, n, S, lam, eps, seeds: Iterable[int], *, d=1, T=1.0,
               tol=1e-8, maxit=None, noise_mode="absolute", dense_cap=DEFAULT_DENSE_CAP):
    op, mu = manufacture(preset, beta, omega, n, S, lam, d=d, T=T)
    P = precond_build(op, dense_cap=dense_cap)
    f_true = op.spec.f_true
    errs, iters = [], []
    for seed in seeds:
        z = build_rhs(op.spec, op.diags, add_noise(mu, eps, seed, mode=noise_mode))
        y, rep = gmres(op, z, P, tol=tol, maxit=maxit)
        errs.append(relative_error(f_true, extract_reconstruction(op, y)))
        iters.append(rep.iterations)
    return {
        "recon_error": float(np.mean(errs)),
        "recon_error_std": float(np.std(errs)),
        "iters_prec": int(max(iters)),
    }


def _run_cell(args):
    cfg, cell = args
    beta, omega, n, S, eps, lam = cell
    row = TableRow(beta, omega, n, S, lam, eps, tuple(int(s) for s in cfg.seeds))
    common = dict(d=cfg.d, T=cfg.T)
    try:
        if cfg.experiment == "cond":
            row.seeds = (0,)
            row.values = cond_cell(cfg.preset, beta, omega, n, S, lam, dense_cap=cfg.dense_cap, **common)
        elif cfg.experiment == "gmres":
            row.seeds = (int(cfg.seeds[0]),)
            vals = gmres_cell(cfg.preset, beta, omega, n, S, lam, eps, row.seeds[0], tol=cfg.tol,
                              maxit=cfg.maxit, noise_mode=cfg.noise_mode,
                              dense_cap=cfg.dense_cap, **common)
            if not vals.pop("converged"):
                row.error = "not converged"
            row.values = vals
        else:
            row.values = recon_cell(cfg.preset, beta, omega, n, S, lam, eps, row.seeds, tol=cfg.tol,
                                    maxit=cfg.maxit, noise_mode=cfg.noise_mode,
                                    dense_cap=cfg.dense_cap, **common)
    except (FracInverseError, np.linalg.LinAlgError) as exc:
        row.error = f"{type(exc).__name__}: {exc}".replace("\n", " ")
    return row


def run_sweep(cfg: SweepConfig, workers: int = 1) -> list[TableRow]:
    """Evaluate every cell; rows come back in input order regardless of workers."""
    jobs = [(cfg, cell) for cell in cfg.cells()]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(_run_cell, jobs))
    return [_run_cell(j) for j in jobs]


def load_json(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data


def strip_timing(csv_text: str) -> str:
    """Drop timing columns so sweep outputs can be compared byte for byte."""
    rows = list(csv.reader(io.StringIO(csv_text)))
    keep = [i for i, h in enumerate(rows[0]) if h not in TIMING_COLUMNS]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for r in rows:
        w.writerow([r[i] for i in keep])
    return buf.getvalue()

