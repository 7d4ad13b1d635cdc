"""Scalar special functions and L1 weights for the Caputo derivative."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class FractionalOrders:
    """Time order ``beta`` in (0, 1) and space order ``omega`` in (1, 2)."""

    beta: float
    omega: float

    def __post_init__(self):
        check_beta(self.beta)
        if not 1.0 < self.omega < 2.0:
            raise DomainError(f"omega must lie in (1, 2), got {self.omega}")


@dataclass(frozen=True)
class TimeGrid:
    S: int
    T: float
    dt: float
    eta: float

    @property
    def times(self) -> np.ndarray:
        """Time levels t_1, ..., t_S (t_0 = 0 excluded)."""
        return self.dt * np.arange(1, self.S + 1)


@dataclass(frozen=True)
class L1Weights:
    """L1 coefficients ``b[m]`` and their differences ``e[m]``, m = 0..S-1."""

    b: np.ndarray
    e: np.ndarray

    def __len__(self):
        return len(self.b)


def check_beta(beta):
    if not 0.0 < beta < 1.0:
        raise DomainError(f"beta must lie in (0, 1), got {beta}")


def gamma_fn(x: float) -> float:
    """Euler Gamma function for positive arguments."""
    if not x > 0:
        raise DomainError(f"gamma_fn requires x > 0, got {x}")
    return math.gamma(x)


def l1_weights(beta: float, S: int) -> L1Weights:
    check_beta(beta)
    if S < 1:
        raise DomainError(f"S must be >= 1, got {S}")
    m = np.arange(S, dtype=float)
    p = 1.0 - beta
    b = (m + 1.0) ** p - m**p
    e = np.empty(S)
    e[0] = b[0]
    e[1:] = b[1:] - b[:-1]
    b.flags.writeable = False
    e.flags.writeable = False
    return L1Weights(b=b, e=e)


def time_grid(beta: float, S: int, T: float = 1.0) -> TimeGrid:
    """Uniform grid ``t_s = s*T/S`` with ``eta = dt**beta * Gamma(2 - beta)``."""
    check_beta(beta)
    if S < 1:
        raise DomainError(f"S must be >= 1, got {S}")
    if not T > 0:
        raise DomainError(f"T must be positive, got {T}")
    dt = T / S
    return TimeGrid(S=int(S), T=float(T), dt=dt, eta=dt**beta * gamma_fn(2.0 - beta))
