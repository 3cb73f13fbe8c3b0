"""SU(2) coherent states of the rotating Morse well and their dynamics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigen import EigenBasis
from .errors import DegenerateError, DomainError, GridMismatchError
from .rotor import RotorConstants
from .special import QuadratureGrid, ln_gamma

__all__ = [
    "CoherentStateSpec",
    "WavePacket",
    "autocorrelation",
    "cs_coefficients",
    "cs_weights",
    "detect_peaks",
    "evolve",
    "fractional_revival_count",
    "periods",
]


@dataclass(frozen=True, eq=False)
class CoherentStateSpec:
    """Normalized expansion weights d_n (n = 0..n_max) of a coherent state."""

    alpha: complex
    j: int
    weights: np.ndarray

    @property
    def n_max(self) -> int:
        return self.weights.size - 1

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.weights) ** 2


@dataclass(frozen=True, eq=False)
class WavePacket:
    """Complex amplitudes of a state sampled on a position grid.

    ``coefficients`` are the eigenbasis amplitudes that produced
    ``amplitudes`` (None for packets built directly on a grid).
    """

    grid: QuadratureGrid
    amplitudes: np.ndarray
    time: float = 0.0
    spec: CoherentStateSpec | None = None
    coefficients: np.ndarray | None = None
    label: str = ""

    @property
    def r(self) -> np.ndarray:
        return self.grid.points

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(self.grid.integrate(self.density))

    def inner(self, other: "WavePacket") -> complex:
        """<self|other> by quadrature on the shared grid."""
        if not self.grid.same_as(other.grid):
            raise GridMismatchError("packets live on different grids")
        return complex(self.grid.integrate(np.conj(self.amplitudes) * other.amplitudes))


def cs_coefficients(lambda_bar: float, n_max: int, alpha: complex) -> np.ndarray:
    """Coherent-state weights for a well with parameter ``lambda_bar``.

    d_n = (-alpha)^(n'-n)/(n'-n)! * sqrt(n'! G(2lb-n) / (n! G(2lb-n')))
    with n' = n_max, evaluated in log space and renormalized to unit norm
    (the closed form omits the displacement-operator prefactor).
    """
    if alpha == 0:
        raise DomainError("alpha must be nonzero")
    n = np.arange(n_max + 1)
    m = n_max - n
    two_lb = 2.0 * lambda_bar
    log_mag = (
        m * math.log(abs(alpha))
        - ln_gamma(m + 1.0)
        + 0.5 * (ln_gamma(n_max + 1.0) + ln_gamma(two_lb - n) - ln_gamma(n + 1.0) - ln_gamma(two_lb - n_max))
    )
    phase = (-complex(alpha) / abs(alpha)) ** m
    w = np.exp(log_mag - log_mag.max()) * phase
    return w / np.linalg.norm(w)


def cs_weights(basis: EigenBasis, alpha: complex = 1.6) -> CoherentStateSpec:
    w = cs_coefficients(basis.constants.lambda_bar_j, basis.n_max, alpha)
    w.setflags(write=False)
    return CoherentStateSpec(alpha=alpha, j=basis.constants.j, weights=w)


def evolve(basis: EigenBasis, spec: CoherentStateSpec, t: float) -> WavePacket:
    """Phi(r, t) = sum_n d_n psi_n(r) exp(-i E_n t), spectrally."""
    if t < 0:
        raise DomainError("t must be >= 0")
    if spec.n_max != basis.n_max:
        raise GridMismatchError("coherent state and basis disagree on n_max")
    coeff = spec.weights * np.exp(-1j * basis.energies * t)
    return WavePacket(
        grid=basis.grid,
        amplitudes=coeff @ basis.psi,
        time=float(t),
        spec=spec,
        coefficients=coeff,
        label=f"j={spec.j}",
    )


def autocorrelation(basis: EigenBasis, spec: CoherentStateSpec, t) -> np.ndarray:
    """|<Phi(0)|Phi(t)>|^2, using orthonormality of the basis."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    amp = np.exp(-1j * np.outer(t, basis.energies)) @ spec.populations
    return np.abs(amp) ** 2


def periods(constants: RotorConstants) -> tuple[float, float]:
    """Classical and revival periods (a.u. of time)."""
    lam, c1, c2 = constants.lambda_j, constants.c1, constants.c2
    denom = 2.0 * c1 - c2 / lam
    if denom <= 0:
        raise DegenerateError(f"classical period undefined (2 c1 - c2/lambda = {denom:.3g})")
    return 2.0 * math.pi * lam / denom, 2.0 * math.pi * lam * lam / c2


def fractional_revival_count(p_bar: int, q_bar: int) -> int:
    """Number of sub-packets at t = (p/q) T_rev."""
    if p_bar < 1 or q_bar < 1:
        raise DomainError("p and q must be positive integers")
    if math.gcd(p_bar, q_bar) != 1:
        raise DomainError(f"{p_bar}/{q_bar} is not in lowest terms")
    return q_bar // 2 if q_bar % 2 == 0 else q_bar


def detect_peaks(packet: WavePacket, threshold: float = 0.05) -> list[tuple[float, float]]:
    """Local maxima of |Phi|^2 above ``threshold`` times the global maximum.

    Positions and heights are refined with a parabola through the three
    samples around each maximum.
    """
    rho = packet.density
    h = packet.grid.step
    cut = threshold * rho.max()
    mid = rho[1:-1]
    idx = np.flatnonzero((mid > rho[:-2]) & (mid >= rho[2:]) & (mid > cut)) + 1
    peaks = []
    for i in idx:
        ym, y0, yp = rho[i - 1], rho[i], rho[i + 1]
        curv = ym - 2 * y0 + yp
        delta = 0.5 * (ym - yp) / curv if curv < 0 else 0.0
        peaks.append((packet.r[i] + delta * h, y0 - 0.25 * (ym - yp) * delta))
    return peaks
