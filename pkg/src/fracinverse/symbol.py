"""Fourier coefficients of the fractional Laplacian symbol and the Toeplitz operator.

The discrete fractional Laplacian on a uniform mesh is the d-level Toeplitz
matrix generated by

    g(theta) = (sum_i 4 sin^2(theta_i / 2)) ** (omega / 2).

Coefficient tensors are stored centered: ``coeffs[l_1 + n_1 - 1, ...]`` holds
``a_l`` for ``l_i = -(n_i - 1), ..., n_i - 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, DomainError, ResourceError
from .numerics import gamma_fn

DEFAULT_DENSE_CAP = 4096
DEFAULT_FFT_CAP = 2**25
FFT_BATCH_POINTS = 2**15


@dataclass(frozen=True)
class SpaceGrid:
    """Tensor mesh of interior nodes ``x_j = a + j*h``, ``j = 1..n`` per direction."""

    n: tuple[int, ...]
    box_lo: tuple[float, ...]
    box_hi: tuple[float, ...]
    h: float

    @property
    def d(self) -> int:
        return len(self.n)

    @property
    def N(self) -> int:
        return math.prod(self.n)

    def axes(self) -> list[np.ndarray]:
        return [lo + self.h * np.arange(1, k + 1) for lo, k in zip(self.box_lo, self.n)]

    def points(self) -> np.ndarray:
        """Node coordinates, shape ``(N, d)``, in lexicographic (C) order."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


def space_grid(n, box_lo=None, box_hi=None) -> SpaceGrid:
    """Build a :class:`SpaceGrid` with ``h = (b - a) / (n + 1)``.

    Defaults to the box ``(0, pi)^d``. The mesh width must be common to all
    directions.
    """
    n = (int(n),) if np.isscalar(n) else tuple(int(k) for k in n)
    if not n or any(k < 1 for k in n):
        raise DomainError(f"grid sizes must be positive, got {n}")
    d = len(n)
    lo = tuple(float(v) for v in (box_lo if box_lo is not None else [0.0] * d))
    hi = tuple(float(v) for v in (box_hi if box_hi is not None else [math.pi] * d))
    if len(lo) != d or len(hi) != d:
        raise DimensionError("box bounds must have one entry per direction")
    hs = [(b - a) / (k + 1) for a, b, k in zip(lo, hi, n)]
    if min(hs) <= 0:
        raise DomainError("box_hi must exceed box_lo in every direction")
    if max(hs) - min(hs) > 1e-12 * max(hs):
        raise DomainError(f"mesh widths differ across directions: {hs}")
    return SpaceGrid(n=n, box_lo=lo, box_hi=hi, h=hs[0])


@dataclass(frozen=True)
class SymbolCoefficients:
    omega: float
    coeffs: np.ndarray

    @property
    def d(self) -> int:
        return self.coeffs.ndim

    @property
    def n(self) -> tuple[int, ...]:
        return tuple((k + 1) // 2 for k in self.coeffs.shape)

    def at(self, *l: int) -> float:
        """Coefficient ``a_l`` for a multi-index ``l``."""
        if len(l) != self.d:
            raise DimensionError(f"expected {self.d} indices, got {len(l)}")
        return float(self.coeffs[tuple(li + ni - 1 for li, ni in zip(l, self.n))])


def _check_omega(omega):
    if not 0.0 < omega <= 2.0:
        raise DomainError(f"omega must lie in (0, 2], got {omega}")


def _mirror(quadrant: np.ndarray) -> np.ndarray:
    """Extend coefficients given for ``l >= 0`` to the centered even tensor."""
    out = quadrant
    for axis in range(quadrant.ndim):
        neg = np.flip(np.take(out, np.arange(1, out.shape[axis]), axis=axis), axis=axis)
        out = np.concatenate([neg, out], axis=axis)
    return out


def symbol_coeffs_1d(omega: float, n: int) -> SymbolCoefficients:
    """Closed-form coefficients for d = 1.

    ``a_0 = Gamma(omega+1) / Gamma(omega/2+1)**2`` and the remaining values
    follow from ``a_{l+1} = (1 - (omega+1)/(omega/2 + l + 1)) * a_l``, which
    avoids Gamma evaluations at negative arguments.
    """
    _check_omega(omega)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    a0 = gamma_fn(omega + 1.0) / gamma_fn(omega / 2.0 + 1.0) ** 2
    ratios = 1.0 - (omega + 1.0) / (omega / 2.0 + np.arange(n - 1) + 1.0)
    half = a0 * np.concatenate([[1.0], np.cumprod(ratios)])
    return SymbolCoefficients(omega=float(omega), coeffs=_mirror(half))


def _rectangle_rule(omega, M, n):
    """Non-negative-orthant coefficients from sampling g on an M^d torus grid."""
    d = len(M)
    s = [4.0 * np.sin(np.pi * np.arange(m) / m) ** 2 for m in M]
    g = np.zeros(tuple(M))
    for i, si in enumerate(s):
        shape = [1] * d
        shape[i] = M[i]
        g += si.reshape(shape)
    np.power(g, omega / 2.0, out=g)
    spec = np.fft.rfftn(g)
    del g
    sel = spec[tuple(slice(0, k) for k in n)].real
    return sel / math.prod(M)


def symbol_coeffs_md(omega: float, n: Sequence[int], *, extrapolate: bool = True,
                     fft_cap: int = DEFAULT_FFT_CAP) -> SymbolCoefficients:
    """Coefficients of g for any dimension via the FFT on a uniform torus grid.

    The grid has ``M_i = max(4 n_i, 1024)`` points per direction. Because g has
    an algebraic singularity at the origin, the rectangle rule aliases with an
    error expanding in powers ``M**-(d + omega + 2j)``. With ``extrapolate``
    (the default) the leading terms are removed by Richardson extrapolation
    over grids ``M``, ``2M``, ``4M`` and, when it fits under ``fft_cap``,
    ``8M``. The fourth level matters for large ``n`` where ``l / M`` is no
    longer small.
    """
    _check_omega(omega)
    n = tuple(int(k) for k in n)
    if not n or any(k < 1 for k in n):
        raise DomainError(f"grid sizes must be positive, got {n}")
    d = len(n)
    M = [max(4 * k, 1024) for k in n]
    levels = [1, 2, 4, 8] if extrapolate else [1]
    if extrapolate and math.prod(8 * m for m in M) > fft_cap:
        levels.pop()
    biggest = math.prod(levels[-1] * m for m in M)
    if biggest > fft_cap:
        raise ResourceError(f"FFT grid of {biggest} points exceeds cap {fft_cap}")

    rows = [_rectangle_rule(omega, [k * m for m in M], n) for k in levels]
    p = d + omega
    while len(rows) > 1:
        f = 2.0**p
        rows = [(f * hi - lo) / (f - 1.0) for lo, hi in zip(rows, rows[1:])]
        p += 2.0
    quadrant = rows[0]
    return SymbolCoefficients(omega=float(omega), coeffs=_mirror(quadrant))


def symbol_coeffs(omega: float, n) -> SymbolCoefficients:
    """Closed form for d = 1, FFT route otherwise."""
    n = (int(n),) if np.isscalar(n) else tuple(n)
    if len(n) == 1:
        return symbol_coeffs_1d(omega, n[0])
    return symbol_coeffs_md(omega, n)


class ToeplitzOperator:
    """Matrix-free d-level Toeplitz matrix built from a coefficient tensor.

    Products go through a circulant embedding of size ``2 n_i`` per level; the
    half spectrum of that embedding is computed once here. Instances are
    immutable and safe to share across threads (``matvec`` allocates its own
    workspace).
    """

    def __init__(self, sym: SymbolCoefficients, grid: SpaceGrid | None = None):
        if grid is not None and tuple(grid.n) != sym.n:
            raise DimensionError(f"grid {grid.n} does not match coefficients {sym.n}")
        self.sym = sym
        self.grid = grid
        self.n = sym.n
        self.N = math.prod(self.n)
        self._fft_shape = tuple(2 * k for k in self.n)
        self._axes = tuple(range(-sym.d, 0))

        padded = np.pad(sym.coeffs, [(0, 1)] * sym.d)
        emb = padded
        for axis, k in enumerate(self.n):
            src = np.concatenate([np.arange(k - 1, 2 * k - 1), [2 * k - 1], np.arange(0, k - 1)])
            emb = np.take(emb, src, axis=axis)
        self.spectrum_cache = np.fft.rfftn(emb)
        self.spectrum_cache.flags.writeable = False

    @property
    def shape(self):
        return (self.N, self.N)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """Apply the Toeplitz matrix to ``x`` of shape ``(N,)`` or to each row of ``(k, N)``."""
        return toeplitz_matvec(self, x)

    def __matmul__(self, x):
        return self.matvec(x)


def toeplitz_matvec(op: ToeplitzOperator, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != op.N:
        raise DimensionError(f"vector length {x.shape[-1]} != operator size {op.N}")
    lead = x.shape[:-1]
    xt = x.reshape((-1,) + op.n)
    out = np.empty(xt.shape)
    keep = (slice(None),) + tuple(slice(0, k) for k in op.n)
    # batch the FFTs so each working set stays cache resident
    chunks = -(-len(xt) * math.prod(op._fft_shape) // FFT_BATCH_POINTS)
    rows = -(-len(xt) // max(chunks, 1))
    for i in range(0, len(xt), rows):
        xf = np.fft.rfftn(xt[i:i + rows], s=op._fft_shape, axes=op._axes)
        xf *= op.spectrum_cache
        out[i:i + rows] = np.fft.irfftn(xf, s=op._fft_shape, axes=op._axes)[keep]
    return out.reshape(lead + (op.N,))


def assemble_dense_toeplitz(op, dense_cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    """Dense Toeplitz matrix with entry ``(i, j) = a_{i - j}`` in lexicographic order.

    Accepts a :class:`ToeplitzOperator` or :class:`SymbolCoefficients`.
    """
    sym = op.sym if isinstance(op, ToeplitzOperator) else op
    n = sym.n
    N = math.prod(n)
    if N > dense_cap:
        raise ResourceError(f"dense Toeplitz of size {N} exceeds cap {dense_cap}")
    idx = np.indices(n).reshape(len(n), N)
    gather = tuple(idx[k][:, None] - idx[k][None, :] + n[k] - 1 for k in range(len(n)))
    return sym.coeffs[gather]
