"""The discretized, quasi-boundary regularized inverse source problem.

Unknowns are ordered ``y = [v^(1); ...; v^(S); f]`` with each block of length
``N = prod(n)``. The block system reads, for ``s = 1..S``,

    D1^(s) (e_0 v^(s) + sum_{m<s} e_{s-m} v^(m)) + (eta/h^w) D2^(s) B v^(s) - eta q^(s) f
        = b_{s-1} D1^(s) rho

together with the regularization row ``v^(S) + (lam/h^w) D2^(S) B f = mu_eps``.
"""
from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import DimensionError, DomainError, SingularBlockError
from .numerics import FractionalOrders, L1Weights, l1_weights, time_grid
from .symbol import (
    DEFAULT_DENSE_CAP,
    SpaceGrid,
    SymbolCoefficients,
    ToeplitzOperator,
    assemble_dense_toeplitz,
    space_grid,
    symbol_coeffs,
)

Field = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class Preset:
    """Coefficient fields as functions of node coordinates ``x`` (shape ``(N, d)``) and time."""

    name: str
    gamma1: Field
    gamma2: Field
    q: Callable[[float], float]
    rho: Callable[[np.ndarray], np.ndarray]
    f: Callable[[np.ndarray], np.ndarray]


def _zeros(x):
    return np.zeros(len(x))


def _source(x):
    return np.prod(x * np.sin(x), axis=1)


PRESETS = {
    "variable": Preset(
        name="variable",
        gamma1=lambda x, t: t * np.exp(x.sum(axis=1)),
        gamma2=lambda x, t: t**2 * np.prod(x, axis=1),
        q=lambda t: t**2,
        rho=_zeros,
        f=_source,
    ),
    "constant": Preset(
        name="constant",
        gamma1=lambda x, t: np.ones(len(x)),
        gamma2=lambda x, t: np.ones(len(x)),
        q=lambda t: 1.0,
        rho=_zeros,
        f=_source,
    ),
}


@dataclass(frozen=True)
class ProblemSpec:
    orders: FractionalOrders
    sgrid: SpaceGrid
    tgrid: TimeGrid
    gamma1: Field
    gamma2: Field
    q: Callable[[float], float]
    rho: np.ndarray
    f_true: np.ndarray | None
    lam: float
    noise_eps: float = 0.0
    preset: str = "custom"

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"lambda must be positive, got {self.lam}")
        if self.noise_eps < 0:
            raise DomainError(f"noise level must be >= 0, got {self.noise_eps}")
        N = self.sgrid.N
        if np.shape(self.rho) != (N,):
            raise DimensionError(f"rho must have length {N}")
        if self.f_true is not None and np.shape(self.f_true) != (N,):
            raise DimensionError(f"f_true must have length {N}")
        qs = np.array([self.q(t) for t in self.tgrid.times])
        if np.any(qs <= 0):
            raise DomainError("q(t_s) must be positive for every time level")


def make_problem(preset: str = "variable", *, beta: float, omega: float, n, S: int,
                 lam: float = 5e-3, eps: float = 0.0, T: float = 1.0) -> ProblemSpec:
    """Problem on ``(0, pi)^d`` from a named preset (``variable`` or ``constant``)."""
    try:
        p = PRESETS[preset]
    except KeyError:
        raise DomainError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}") from None
    orders = FractionalOrders(beta, omega)
    sgrid = space_grid(n)
    x = sgrid.points()
    return ProblemSpec(
        orders=orders,
        sgrid=sgrid,
        tgrid=time_grid(beta, S, T),
        gamma1=p.gamma1,
        gamma2=p.gamma2,
        q=p.q,
        rho=np.asarray(p.rho(x), dtype=float),
        f_true=np.asarray(p.f(x), dtype=float),
        lam=float(lam),
        noise_eps=float(eps),
        preset=p.name,
    )


@dataclass(frozen=True)
class CoefficientDiagonals:
    """``D1[s - 1, j] = gamma1(x_j, t_s)`` and likewise ``D2``, shape ``(S, N)``."""

    D1: np.ndarray
    D2: np.ndarray


def sample_fields(spec: ProblemSpec) -> CoefficientDiagonals:
    x = spec.sgrid.points()
    N = len(x)
    t = spec.tgrid.times
    D1 = np.array([np.broadcast_to(spec.gamma1(x, ts), (N,)) for ts in t], dtype=float)
    D2 = np.array([np.broadcast_to(spec.gamma2(x, ts), (N,)) for ts in t], dtype=float)
    return CoefficientDiagonals(D1=D1, D2=D2)


@dataclass(frozen=True)
class SystemOperator:
    """Matrix-free block system of dimension ``(S + 1) N``."""

    spec: ProblemSpec
    diags: CoefficientDiagonals
    weights: L1Weights
    B: ToeplitzOperator
    qs: np.ndarray
    scale_space: float
    scale_reg: float

    @property
    def S(self) -> int:
        return self.spec.tgrid.S

    @property
    def N(self) -> int:
        return self.spec.sgrid.N

    @property
    def dim(self) -> int:
        return (self.S + 1) * self.N

    @property
    def shape(self):
        return (self.dim, self.dim)

    @property
    def eta(self) -> float:
        return self.spec.tgrid.eta

    @cached_property
    def memory_matrix(self) -> np.ndarray:
        """Lower-triangular Toeplitz ``E[r, c] = e_{r-c}`` coupling time levels."""
        e = self.weights.e
        return scipy.linalg.toeplitz(e, np.zeros(len(e)))

    @cached_property
    def _space_rows(self) -> np.ndarray:
        return self.scale_space * self.diags.D2

    @cached_property
    def _source_coupling(self) -> np.ndarray:
        return (self.eta * self.qs)[:, None]

    def matvec(self, y):
        return apply_system(self, y)

    def __matmul__(self, y):
        return apply_system(self, y)

    def with_lambda(self, lam: float) -> "SystemOperator":
        """Same discretization with another regularization parameter."""
        spec = dataclasses.replace(self.spec, lam=float(lam))
        h = spec.sgrid.h
        return dataclasses.replace(self, spec=spec, scale_reg=lam / h**spec.orders.omega)


def build_system(spec: ProblemSpec, sym: SymbolCoefficients | None = None) -> SystemOperator:
    omega = spec.orders.omega
    if sym is None:
        sym = symbol_coeffs(omega, spec.sgrid.n)
    B = ToeplitzOperator(sym, spec.sgrid)
    h_w = spec.sgrid.h**omega
    eta = spec.tgrid.eta
    return SystemOperator(
        spec=spec,
        diags=sample_fields(spec),
        weights=l1_weights(spec.orders.beta, spec.tgrid.S),
        B=B,
        qs=np.array([spec.q(t) for t in spec.tgrid.times], dtype=float),
        scale_space=eta / h_w,
        scale_reg=spec.lam / h_w,
    )


def _blocks(op: SystemOperator, y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape != (op.dim,):
        raise DimensionError(f"vector of length {y.size} given, operator has dimension {op.dim}")
    return y.reshape(op.S + 1, op.N)


def apply_system(op: SystemOperator, y: np.ndarray) -> np.ndarray:
    """System product in ``O(S^2 N + S N log N)`` without forming the matrix."""
    Y = _blocks(op, y)
    S = op.S
    V, f = Y[:S], Y[S]
    BY = op.B.matvec(Y)  # all S + 1 blocks in one batched FFT
    Z = np.empty_like(Y)
    np.matmul(op.memory_matrix, V, out=Z[:S])
    Z[:S] *= op.diags.D1
    BY[:S] *= op._space_rows
    Z[:S] += BY[:S]
    Z[:S] -= op._source_coupling * f
    np.multiply(op.scale_reg * op.diags.D2[S - 1], BY[S], out=Z[S])
    Z[S] += V[S - 1]
    return Z.ravel()


def build_rhs(spec: ProblemSpec, diags: CoefficientDiagonals, mu_eps: np.ndarray) -> np.ndarray:
    N, S = spec.sgrid.N, spec.tgrid.S
    mu_eps = np.asarray(mu_eps, dtype=float)
    if mu_eps.shape != (N,):
        raise DimensionError(f"mu_eps must have length {N}, got {mu_eps.shape}")
    b = l1_weights(spec.orders.beta, S).b
    z = np.empty((S + 1, N))
    z[:S] = b[:, None] * diags.D1 * spec.rho[None, :]
    z[S] = mu_eps
    return z.ravel()


def extract_reconstruction(op: SystemOperator, y: np.ndarray) -> np.ndarray:
    """The reconstructed-source block of a solution vector."""
    return _blocks(op, y)[op.S].copy()


def relative_error(f: np.ndarray, f_rec: np.ndarray) -> float:
    return float(np.linalg.norm(f - f_rec) / np.linalg.norm(f))


# -- dense diagonal blocks shared by the forward solver and the preconditioner --

def dense_B(op: SystemOperator, dense_cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    return assemble_dense_toeplitz(op.B, dense_cap=dense_cap)


def diagonal_block(op: SystemOperator, s: int, Bd: np.ndarray | None = None) -> np.ndarray:
    """Dense ``e_0 D1^(s) + (eta/h^w) D2^(s) B`` for 1-based time level ``s``."""
    if Bd is None:
        Bd = dense_B(op)
    blk = op.scale_space * op.diags.D2[s - 1][:, None] * Bd
    blk[np.diag_indices(op.N)] += op.weights.e[0] * op.diags.D1[s - 1]
    return blk


def final_block(op: SystemOperator, Bd: np.ndarray | None = None) -> np.ndarray:
    """Dense regularization block ``(lam/h^w) D2^(S) B``."""
    if Bd is None:
        Bd = dense_B(op)
    return op.scale_reg * op.diags.D2[op.S - 1][:, None] * Bd


PIVOT_RTOL = 1e-14


def factorize_block(block: np.ndarray, time_index: int):
    """LU with partial pivoting; raises :class:`SingularBlockError` on tiny pivots."""
    scale = float(np.abs(block).max()) if block.size else 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(block, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if not np.all(np.isfinite(lu)) or pivots.min() <= PIVOT_RTOL * scale:
        raise SingularBlockError(time_index)
    return lu, piv


def forward_solve(problem: ProblemSpec | SystemOperator, f: np.ndarray | None = None):
    """Solve the direct problem for given source ``f`` (defaults to ``f_true``).

    Block forward substitution on the lower block-triangular time-stepping
    matrix. Returns ``(states, mu)`` with ``states`` of shape ``(S, N)`` and
    ``mu = states[-1]``.
    """
    op = problem if isinstance(problem, SystemOperator) else build_system(problem)
    spec = op.spec
    if f is None:
        f = spec.f_true
    if f is None:
        raise DomainError("no source given and spec.f_true is unset")
    f = np.asarray(f, dtype=float)
    S, N = op.S, op.N
    D1 = op.diags.D1
    e, b = op.weights.e, op.weights.b
    Bd = dense_B(op)
    states = np.zeros((S, N))
    for s in range(1, S + 1):
        rhs = b[s - 1] * D1[s - 1] * spec.rho + op.eta * op.qs[s - 1] * f
        if s > 1:
            hist = e[s - 1:0:-1] @ states[: s - 1]
            rhs = rhs - D1[s - 1] * hist
        lu = factorize_block(diagonal_block(op, s, Bd), s)
        states[s - 1] = scipy.linalg.lu_solve(lu, rhs, check_finite=False)
    return states, states[-1].copy()


def add_noise(mu: np.ndarray, eps: float, seed: int, mode: str = "absolute") -> np.ndarray:
    """Perturb final-time data with seeded uniform noise ``delta_j`` on (-1, 1).

    ``mode="absolute"`` returns ``mu + eps * delta``; ``mode="relative"``
    returns ``mu * (1 + eps * delta)``. Draws come from a PCG64 stream seeded
    with ``seed``, in grid order.
    """
    if eps < 0:
        raise DomainError(f"noise level must be >= 0, got {eps}")
    mu = np.asarray(mu, dtype=float)
    if eps == 0:
        return mu.copy()
    delta = np.random.Generator(np.random.PCG64(seed)).uniform(-1.0, 1.0, size=mu.shape)
    if mode == "absolute":
        return mu + eps * delta
    if mode == "relative":
        return mu * (1.0 + eps * delta)
    raise DomainError(f"unknown noise mode {mode!r}")

