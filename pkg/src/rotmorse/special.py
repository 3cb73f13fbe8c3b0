"""Special functions and quadrature on uniform grids."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DomainError

__all__ = ["QuadratureGrid", "laguerre", "ln_gamma", "uniform_grid"]


def laguerre(n, a, y):
    """Generalized Laguerre polynomial L_n^a(y) for real a > -1.

    Uses the upward three-term recurrence in n, which is stable for y >= 0
    and works for non-integer upper index. ``y`` may be a scalar or array.
    """
    n = int(n)
    if n < 0:
        raise DomainError(f"degree must be non-negative, got {n}")
    if not np.isfinite(a) or a <= -1.0:
        raise DomainError(f"upper index must be finite and > -1, got {a}")
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise DomainError("argument must be >= 0")
    prev = np.ones_like(y)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + a - y
    for k in range(1, n):
        nxt = ((2 * k + 1 + a - y) * cur - (k + a) * prev) / (k + 1)
        prev, cur = cur, nxt
    return cur if np.ndim(cur) else float(cur)


def ln_gamma(x):
    """Natural log of the gamma function for x > 0 (scalar or array)."""
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("ln_gamma is defined here only for x > 0")
    if arr.ndim == 0:
        return math.lgamma(float(arr))
    return gammaln(arr)


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Uniform 1-D grid with composite quadrature weights.

    ``kind`` is ``"simpson"`` or ``"trapezoid"``. Simpson grids always
    carry an odd number of points.
    """

    points: np.ndarray
    weights: np.ndarray
    kind: str = "simpson"

    @property
    def step(self) -> float:
        return float(self.points[1] - self.points[0])

    @property
    def size(self) -> int:
        return self.points.size

    def integrate(self, values) -> complex | float:
        return np.dot(self.weights, values)

    def same_as(self, other: "QuadratureGrid") -> bool:
        return (
            self.size == other.size
            and self.kind == other.kind
            and np.allclose(self.points, other.points, rtol=0, atol=1e-12)
        )


def uniform_grid(a: float, b: float, n: int, kind: str = "simpson") -> QuadratureGrid:
    """Build equally spaced points on [a, b] with matching weights.

    For Simpson an even ``n`` is bumped to ``n + 1``.
    """
    if not b > a:
        raise DomainError(f"empty interval [{a}, {b}]")
    if kind == "simpson":
        if n < 3:
            raise DomainError("simpson needs at least 3 points")
        if n % 2 == 0:
            n += 1
    elif kind == "trapezoid":
        if n < 2:
            raise DomainError("trapezoid needs at least 2 points")
    else:
        raise DomainError(f"unknown quadrature kind {kind!r}")
    x = np.linspace(a, b, n)
    h = x[1] - x[0]
    if kind == "simpson":
        w = np.full(n, 2.0)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        w *= h / 3.0
    else:
        w = np.full(n, h)
        w[0] = w[-1] = h / 2.0
    return QuadratureGrid(x, w, kind)
