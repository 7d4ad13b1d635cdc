"""Dense realizations of the block matrices and their spectra.

Dense matrices are assembled entrywise from the block formulas, independently
of the FFT matvec, so they serve as a verification oracle for the matrix-free
code as well as for eigenvalue and condition-number studies.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import FracInverseError, ResourceError
from .symbol import DEFAULT_DENSE_CAP
from .system import SystemOperator, dense_B, diagonal_block, final_block

KINDS = ("A", "P", "forward")
DEFAULT_CLUSTER_TOL = 1e-6


class EigensolverError(FracInverseError):
    pass


@dataclass(frozen=True)
class DenseSystem:
    matrix: np.ndarray
    kind: str


@dataclass(frozen=True)
class SpectralSummary:
    eigenvalues: np.ndarray
    cond_2: float
    cluster_count: int
    outlier_count: int


def assemble_dense_system(op: SystemOperator, kind: str = "A",
                          dense_cap: int = DEFAULT_DENSE_CAP) -> DenseSystem:
    """Dense system (``"A"``), preconditioner (``"P"``) or forward time-stepping matrix (``"forward"``)."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    S, N = op.S, op.N
    dim = S * N if kind == "forward" else (S + 1) * N
    if dim > dense_cap:
        raise ResourceError(f"dense system of dimension {dim} exceeds cap {dense_cap}")
    Bd = dense_B(op, dense_cap)
    e = op.weights.e
    D1 = op.diags.D1
    M = np.zeros((dim, dim))

    def blk(r, c):
        return M[r * N:(r + 1) * N, c * N:(c + 1) * N]

    for s in range(1, S + 1):
        r = s - 1
        blk(r, r)[...] = diagonal_block(op, s, Bd)
        for m in range(1, s):
            blk(r, m - 1)[np.diag_indices(N)] = e[s - m] * D1[r]
        if kind == "A":
            blk(r, S)[np.diag_indices(N)] = -op.eta * op.qs[r]
    if kind != "forward":
        blk(S, S - 1)[np.diag_indices(N)] = 1.0
        blk(S, S)[...] = final_block(op, Bd)
    return DenseSystem(matrix=M, kind=kind)


def _matrix(M):
    return M.matrix if isinstance(M, DenseSystem) else np.asarray(M)


def preconditioned_matrix(A, P) -> np.ndarray:
    """``P^{-1} A`` formed by solving against every column of ``A``."""
    return scipy.linalg.solve(_matrix(P), _matrix(A), check_finite=False)


def eigenvalues_dense(M, P=None) -> np.ndarray:
    """All eigenvalues of ``M`` or, when ``P`` is given, of ``P^{-1} M``."""
    X = _matrix(M) if P is None else preconditioned_matrix(M, P)
    try:
        return scipy.linalg.eigvals(X, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(str(exc)) from exc


def condition_number_2(M, P=None) -> float:
    """2-norm condition number ``sigma_max / sigma_min``; ``inf`` if singular."""
    X = _matrix(M) if P is None else preconditioned_matrix(M, P)
    sv = scipy.linalg.svdvals(X, check_finite=False)
    if sv[-1] == 0.0:
        return float("inf")
    return float(sv[0] / sv[-1])


def spectral_summary(M, P=None, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> SpectralSummary:
    eig = eigenvalues_dense(M, P)
    cluster = int(np.count_nonzero(np.abs(eig - 1.0) <= cluster_tol))
    return SpectralSummary(
        eigenvalues=eig,
        cond_2=condition_number_2(M, P),
        cluster_count=cluster,
        outlier_count=len(eig) - cluster,
    )


def numerical_rank(M, rtol: float = 1e-10) -> int:
    """Number of singular values above ``rtol`` times the largest."""
    sv = scipy.linalg.svdvals(_matrix(M), check_finite=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv > rtol * sv[0]))
