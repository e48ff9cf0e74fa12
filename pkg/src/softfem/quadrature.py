"""Gauss-Legendre and Gauss-Lobatto quadrature rules on [-1, 1].

These two families are the building blocks of the blended mass matrices:
the Legendre rule gives the consistent mass, the Lobatto rule (on a Lobatto
nodal basis) gives the lumped, diagonal mass.

Nodes are computed by Newton iteration on Legendre polynomials starting
from Chebyshev-type initial guesses, which converges to machine precision
for every size used here (n <= 16 is all the assembly ever asks for).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

_NEWTON_TOL = 1e-15
_NEWTON_MAX_ITER = 100


class Family(str, Enum):
    """Quadrature family on the reference interval."""

    GAUSS_LEGENDRE = "gauss-legendre"
    GAUSS_LOBATTO = "gauss-lobatto"


@dataclass(frozen=True)
class QuadratureRule:
    """Immutable quadrature rule on [-1, 1].

    Attributes:
        family: which Gauss-type family the rule belongs to.
        points: strictly increasing abscissae in [-1, 1].
        weights: positive weights, same length as points; they sum to 2.
    """

    family: Family
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if points.shape != weights.shape or points.ndim != 1:
            raise ValueError("points and weights must be 1d arrays of equal length")
        if np.any(np.diff(points) <= 0):
            raise ValueError("points must be strictly increasing")
        if points[0] < -1.0 - 1e-14 or points[-1] > 1.0 + 1e-14:
            raise ValueError("points must lie in [-1, 1]")
        if np.any(weights <= 0):
            raise ValueError("weights must be positive")
        points.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return self.points.size

    @property
    def exactness_degree(self) -> int:
        """Highest polynomial degree the rule integrates exactly."""
        n = len(self)
        if self.family is Family.GAUSS_LEGENDRE:
            return 2 * n - 1
        return 2 * n - 3


def _legendre(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate P_n and P_{n-1} by the three-term recurrence."""
    p_prev = np.zeros_like(x)
    p = np.ones_like(x)
    for k in range(1, n + 1):
        p_prev, p = p, ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
    return p, p_prev


def _legendre_deriv(n: int, x: np.ndarray, p: np.ndarray,
                    p_prev: np.ndarray) -> np.ndarray:
    """P_n' from (1-x^2) P_n' = n (P_{n-1} - x P_n); interior points only."""
    return n * (p_prev - x * p) / (1.0 - x * x)


def _symmetrize(points: np.ndarray, weights: np.ndarray):
    """Enforce exact reflection symmetry of a Gauss-type rule."""
    points = 0.5 * (points - points[::-1])
    weights = 0.5 * (weights + weights[::-1])
    return points, weights


def gauss_legendre(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre rule on [-1, 1]; exact for degree <= 2n-1.

    Args:
        n: number of points, n >= 1.

    Raises:
        ValueError: if n < 1.
    """
    if n < 1:
        raise ValueError(f"Gauss-Legendre rule needs n >= 1, got {n}")
    if n == 1:
        return QuadratureRule(Family.GAUSS_LEGENDRE, np.array([0.0]), np.array([2.0]))

    i = np.arange(1, n + 1)
    x = np.cos(np.pi * (i - 0.25) / (n + 0.5))
    for _ in range(_NEWTON_MAX_ITER):
        p, p_prev = _legendre(n, x)
        dx = p / _legendre_deriv(n, x, p, p_prev)
        x = x - dx
        if np.max(np.abs(dx)) < _NEWTON_TOL:
            break
    p, p_prev = _legendre(n, x)
    dp = _legendre_deriv(n, x, p, p_prev)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    x, w = _symmetrize(x[order], w[order])
    return QuadratureRule(Family.GAUSS_LEGENDRE, x, w)


def gauss_lobatto(n: int) -> QuadratureRule:
    """n-point Gauss-Lobatto rule on [-1, 1]; exact for degree <= 2n-3.

    Both endpoints are nodes; the interior nodes are the roots of P'_{n-1}.

    Args:
        n: number of points, n >= 2.

    Raises:
        ValueError: if n < 2.
    """
    if n < 2:
        raise ValueError(f"Gauss-Lobatto rule needs n >= 2, got {n}")
    m = n - 1
    if n == 2:
        x = np.array([-1.0, 1.0])
    else:
        # interior roots of P'_m from Chebyshev-Lobatto guesses
        k = np.arange(1, m)
        x_in = np.cos(np.pi * k / m)
        for _ in range(_NEWTON_MAX_ITER):
            p, p_prev = _legendre(m, x_in)
            dp = _legendre_deriv(m, x_in, p, p_prev)
            # P_m'' from the Legendre ODE: (1-x^2) P'' = 2 x P' - m (m+1) P
            ddp = (2.0 * x_in * dp - m * (m + 1) * p) / (1.0 - x_in * x_in)
            dx = dp / ddp
            x_in = x_in - dx
            if np.max(np.abs(dx)) < _NEWTON_TOL:
                break
        x = np.concatenate(([-1.0], np.sort(x_in), [1.0]))
    p, _ = _legendre(m, x)
    w = 2.0 / (m * (m + 1) * p * p)
    x, w = _symmetrize(x, w)
    return QuadratureRule(Family.GAUSS_LOBATTO, x, w)


def rule(family: Family, n: int) -> QuadratureRule:
    """Dispatch by family."""
    if family is Family.GAUSS_LEGENDRE:
        return gauss_legendre(n)
    if family is Family.GAUSS_LOBATTO:
        return gauss_lobatto(n)
    raise ValueError(f"unknown quadrature family: {family!r}")
