"""Bound states of the rotating Morse system for fixed (molecule, j)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .rotor import RotorConstants
from .special import QuadratureGrid, laguerre, ln_gamma, uniform_grid

__all__ = [
    "EigenBasis",
    "EigenState",
    "build_basis",
    "default_grid",
    "eigen_energy",
    "eigen_wavefunction",
    "expanded_potential",
    "num_bound_states",
]

DEFAULT_POINTS = 4096
# Tail of the least-bound state is followed out to this relative density.
TAIL_DENSITY = 1e-12
MAX_TAIL = 150.0  # in units of 1/beta


@dataclass(frozen=True)
class EigenState:
    n: int
    s: float
    energy: float
    norm_const: float


@dataclass(frozen=True, eq=False)
class EigenBasis:
    """The n_max + 1 bound states sampled on a shared r grid.

    ``psi[n]`` holds the real, unit-normalized wavefunction of state n on
    ``grid.points``; ``scale[n]`` is the factor applied to the analytic
    form to reach unit norm on this grid.
    """

    constants: RotorConstants
    states: tuple[EigenState, ...]
    grid: QuadratureGrid
    psi: np.ndarray
    scale: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.states) - 1

    @property
    def energies(self) -> np.ndarray:
        return np.array([st.energy for st in self.states])

    def overlaps(self) -> np.ndarray:
        """Gram matrix <psi_m|psi_n> on the grid."""
        return (self.psi * self.grid.weights) @ self.psi.T


def num_bound_states(constants: RotorConstants) -> int:
    """Index n_max of the highest bound state (largest n with s > 0)."""
    lb = constants.lambda_bar_j
    if lb <= 0.5:
        raise DomainError(f"lambda_bar={lb} admits no bound state")
    return math.ceil(lb - 0.5) - 1


def _check_n(constants, n):
    n_max = num_bound_states(constants)
    if int(n) != n or not 0 <= n <= n_max:
        raise IndexError(f"n={n} outside bound-state range 0..{n_max}")
    return int(n)


def eigen_energy(constants: RotorConstants, n: int) -> float:
    """E_{n,j} in hartree, measured from the dissociation threshold."""
    n = _check_n(constants, n)
    c0, c1, c2, lam = constants.c0, constants.c1, constants.c2, constants.lambda_j
    x = n + 0.5
    return 2.0 * c1 / lam * x - c2 / lam**2 * x * x + c0 - c1 * c1 / c2


def expanded_potential(constants: RotorConstants, r):
    """c0 - 2 c1 z + c2 z^2 with z = exp(-beta (r - r0)).

    This is the Morse well plus the centrifugal term expanded to second
    order about r_j; its exact spectrum is ``eigen_energy``.
    """
    p = constants.params
    z = np.exp(-p.beta * (np.asarray(r, dtype=float) - p.r0))
    return constants.c0 - 2.0 * constants.c1 * z + constants.c2 * z * z


def _exponent_s(constants, n):
    return constants.lambda_bar_j - n - 0.5


def _log_norm(constants, n):
    lb = constants.lambda_bar_j
    s = _exponent_s(constants, n)
    return 0.5 * (math.log(constants.params.beta * 2.0 * s) + ln_gamma(n + 1) - ln_gamma(2 * lb - n))


def _raw_wavefunction(constants, n, r):
    p = constants.params
    r = np.asarray(r, dtype=float)
    y = 2.0 * constants.lambda_j * np.exp(-p.beta * (r - p.r0))
    s = _exponent_s(constants, n)
    lag = laguerre(n, 2.0 * s, y)
    with np.errstate(divide="ignore"):
        log_amp = _log_norm(constants, n) - 0.5 * y + s * np.log(y) + np.log(np.abs(lag))
    return np.sign(lag) * np.exp(log_amp)


def default_grid(constants: RotorConstants, n_points: int = DEFAULT_POINTS) -> QuadratureGrid:
    """Uniform Simpson grid covering every bound state of ``constants``.

    Nominal span is [max(r0/2, r_j - 12/beta), r_j + 25/beta] with
    ``n_points`` intervals. When the least-bound state decays more slowly
    than that span allows, the right edge moves out (at the same step) until
    its density tail falls below ``TAIL_DENSITY``, up to ``MAX_TAIL``/beta.
    """
    p = constants.params
    left = max(0.5 * p.r0, constants.r_j - 12.0 / p.beta)
    right = constants.r_j + 25.0 / p.beta
    step = (right - left) / n_points
    s_min = _exponent_s(constants, num_bound_states(constants))
    tail = -math.log(TAIL_DENSITY) / (2.0 * s_min)
    if tail > 25.0:
        right = constants.r_j + min(tail, MAX_TAIL) / p.beta
    n = int(math.ceil((right - left) / step))
    n += n % 2  # Simpson needs an even number of intervals
    return uniform_grid(left, left + n * step, n + 1)


def build_basis(constants: RotorConstants, grid: QuadratureGrid | None = None) -> EigenBasis:
    """Evaluate and renormalize all bound states on ``grid``."""
    if grid is None:
        grid = default_grid(constants)
    n_max = num_bound_states(constants)
    psi = np.empty((n_max + 1, grid.size))
    scale = np.empty(n_max + 1)
    states = []
    for n in range(n_max + 1):
        raw = _raw_wavefunction(constants, n, grid.points)
        norm2 = grid.integrate(raw * raw)
        scale[n] = 1.0 / math.sqrt(norm2)
        psi[n] = raw * scale[n]
        states.append(
            EigenState(
                n=n,
                s=_exponent_s(constants, n),
                energy=eigen_energy(constants, n),
                norm_const=math.exp(_log_norm(constants, n)),
            )
        )
    psi.setflags(write=False)
    scale.setflags(write=False)
    return EigenBasis(constants, tuple(states), grid, psi, scale)


def eigen_wavefunction(basis: EigenBasis, n: int, r):
    """psi_{n,j}(r), normalized on the basis grid.

    Evaluated in log space (the gamma ratios and y^s overflow for the
    lambda ~ 70 wells of heavy molecules) with the sign of the Laguerre
    factor carried separately.
    """
    n = _check_n(basis.constants, n)
    out = _raw_wavefunction(basis.constants, n, r) * basis.scale[n]
    return out if np.ndim(out) else float(out)
