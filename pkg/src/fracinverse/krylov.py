"""Block lower-triangular preconditioner and full GMRES."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DimensionError, DomainError, ResourceError
from .symbol import DEFAULT_DENSE_CAP
from .system import SystemOperator, dense_B, diagonal_block, factorize_block, final_block

BREAKDOWN_RTOL = 1e-14
REORTH_THRESHOLD = 1.0 / math.sqrt(2.0)


class BlockTriangularPreconditioner:
    """The system matrix with its last block column zeroed above the
    regularization row.

    All ``S + 1`` dense diagonal blocks are LU-factorized once at build time.
    Applying the inverse is a block forward substitution. The object is
    read-only after construction, so concurrent applies are safe.
    """

    def __init__(self, op: SystemOperator, block_factors, final_factor):
        self.op = op
        self.S = op.S
        self.n_total = op.N
        self.block_factors = tuple(block_factors)
        self.final_factor = final_factor
        self.weights = op.weights
        self.diags = op.diags

    @property
    def dim(self) -> int:
        return (self.S + 1) * self.n_total

    def apply(self, z: np.ndarray) -> np.ndarray:
        return precond_apply(self, z)

    __call__ = apply


def precond_build(op: SystemOperator, dense_cap: int = DEFAULT_DENSE_CAP) -> BlockTriangularPreconditioner:
    if op.N > dense_cap:
        raise ResourceError(f"diagonal blocks of size {op.N} exceed dense cap {dense_cap}")
    Bd = dense_B(op, dense_cap)
    factors = [factorize_block(diagonal_block(op, s, Bd), s) for s in range(1, op.S + 1)]
    final = factorize_block(final_block(op, Bd), op.S + 1)
    return BlockTriangularPreconditioner(op, factors, final)


def precond_apply(P: BlockTriangularPreconditioner, z: np.ndarray) -> np.ndarray:
    """Solve ``P y = z`` by block forward substitution."""
    z = np.asarray(z, dtype=float)
    if z.shape != (P.dim,):
        raise DimensionError(f"vector of length {z.size} given, preconditioner has dimension {P.dim}")
    S, N = P.S, P.n_total
    Z = z.reshape(S + 1, N)
    Y = np.empty_like(Z)
    e = P.weights.e
    D1 = P.diags.D1
    for s in range(1, S + 1):
        rhs = Z[s - 1]
        if s > 1:
            rhs = rhs - D1[s - 1] * (e[s - 1:0:-1] @ Y[: s - 1])
        Y[s - 1] = scipy.linalg.lu_solve(P.block_factors[s - 1], rhs, check_finite=False)
    Y[S] = scipy.linalg.lu_solve(P.final_factor, Z[S] - Y[S - 1], check_finite=False)
    return Y.ravel()


@dataclass
class SolveReport:
    iterations: int
    residual_history: list[float] = field(default_factory=list)
    converged: bool = False
    wall_time_seconds: float = 0.0
    final_true_residual: float = float("nan")
    breakdown: bool = False

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "residual_history": list(self.residual_history),
            "final_true_residual": self.final_true_residual,
            "wall_time_seconds": self.wall_time_seconds,
            "breakdown": self.breakdown,
        }


def _as_operator(A):
    if A is None:
        return None
    if callable(A):
        return A
    if hasattr(A, "matvec"):
        return A.matvec
    M = np.asarray(A)
    return lambda v: M @ v


def gmres(A, b, M_inv=None, *, tol: float = 1e-8, maxit: int | None = None,
          x0: np.ndarray | None = None):
    """Full (non-restarted) GMRES with optional left preconditioning.

    Parameters
    ----------
    A : callable, object with ``matvec``, or array
        The system operator.
    b : ndarray
        Right-hand side.
    M_inv : callable, optional
        Applies the inverse preconditioner; the method then works on
        ``M^{-1} A y = M^{-1} b`` and monitors the preconditioned residual.
    tol : float
        Stop once ``||M^{-1}(b - A y_k)|| / ||M^{-1} b|| <= tol``.
    maxit : int, optional
        Iteration cap, defaults to the system dimension.
    x0 : ndarray, optional
        Initial guess, defaults to zero.

    Returns
    -------
    x : ndarray
    report : SolveReport

    Notes
    -----
    Arnoldi uses modified Gram-Schmidt with a second pass whenever the new
    vector loses more than a factor ``1/sqrt(2)`` of its norm. The small
    least-squares problem is kept triangular by Givens rotations, so the
    residual norm is available at every step without forming the iterate.
    """
    t0 = time.perf_counter()
    apply_A = _as_operator(A)
    apply_M = _as_operator(M_inv) or (lambda v: v)
    b = np.asarray(b, dtype=float)
    n = b.size
    if maxit is None:
        maxit = n
    if maxit < 1:
        raise DomainError(f"maxit must be >= 1, got {maxit}")
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    x0 = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).copy()
    if x0.shape != b.shape:
        raise DimensionError("x0 and b must have the same shape")

    bnorm = float(np.linalg.norm(b))
    ref = float(np.linalg.norm(apply_M(b)))
    if ref == 0.0:
        return np.zeros(n), SolveReport(0, [0.0], True, time.perf_counter() - t0, 0.0)

    r0 = apply_M(b - apply_A(x0)) if np.any(x0) else apply_M(b)
    beta = float(np.linalg.norm(r0))
    history = [float(beta / ref)]
    if history[0] <= tol:
        true_res = float(np.linalg.norm(b - apply_A(x0))) / bnorm
        return x0, SolveReport(0, history, True, time.perf_counter() - t0, true_res)

    cap = min(maxit, n, 32)
    V = np.empty((cap + 1, n))
    R = np.zeros((cap + 1, cap))
    cs = np.zeros(cap)
    sn = np.zeros(cap)
    g = np.zeros(cap + 1)
    V[0] = r0 / beta
    g[0] = beta
    breakdown = False
    k = 0
    for k in range(maxit):
        if k + 1 > cap:
            cap = min(2 * cap, maxit)
            V = np.concatenate([V, np.empty((cap + 1 - len(V), n))])
            R = np.pad(R, ((0, cap + 1 - R.shape[0]), (0, cap - R.shape[1])))
            cs, sn, g = np.pad(cs, (0, cap - len(cs))), np.pad(sn, (0, cap - len(sn))), np.pad(g, (0, cap + 1 - len(g)))

        w = apply_M(apply_A(V[k]))
        norm_before = float(np.linalg.norm(w))
        col = np.zeros(k + 2)
        for j in range(k + 1):
            c = V[j] @ w
            w -= c * V[j]
            col[j] = c
        norm_after = float(np.linalg.norm(w))
        if norm_after < REORTH_THRESHOLD * norm_before:
            for j in range(k + 1):
                c = V[j] @ w
                w -= c * V[j]
                col[j] += c
            norm_after = float(np.linalg.norm(w))
        col[k + 1] = norm_after

        for j in range(k):
            col[j], col[j + 1] = cs[j] * col[j] + sn[j] * col[j + 1], -sn[j] * col[j] + cs[j] * col[j + 1]
        rho = math.hypot(col[k], col[k + 1])
        if rho == 0.0:
            cs[k], sn[k] = 1.0, 0.0
        else:
            cs[k], sn[k] = col[k] / rho, col[k + 1] / rho
        col[k], col[k + 1] = rho, 0.0
        g[k + 1] = -sn[k] * g[k]
        g[k] = cs[k] * g[k]
        R[: k + 1, k] = col[: k + 1]
        history.append(float(abs(g[k + 1]) / ref) if rho > 0 else history[-1])

        if norm_after <= BREAKDOWN_RTOL * ref:
            breakdown = True
            break
        V[k + 1] = w / norm_after
        if history[-1] <= tol:
            break

    m = k + 1
    diag = np.abs(np.diag(R[:m, :m]))
    if breakdown and diag[-1] == 0.0:
        m -= 1  # singular trailing column: keep the last solvable subspace
    if m > 0:
        coef = scipy.linalg.solve_triangular(R[:m, :m], g[:m], check_finite=False)
        x = x0 + V[:m].T @ coef
    else:
        x = x0
    true_res = float(np.linalg.norm(b - apply_A(x))) / bnorm if bnorm > 0 else 0.0
    report = SolveReport(
        iterations=k + 1,
        residual_history=history,
        converged=bool(history[-1] <= tol),
        wall_time_seconds=time.perf_counter() - t0,
        final_true_residual=true_res,
        breakdown=breakdown,
    )
    return x, report
