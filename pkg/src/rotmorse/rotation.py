"""Phase-space rotation of the non-rotating packet and rotation-angle estimates."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize_scalar

from .coherent import CoherentStateSpec, WavePacket, cs_weights, periods
from .eigen import EigenBasis, build_basis, default_grid
from .errors import DomainError
from .rotor import MoleculeParams, RotorConstants, rotor_constants
from .special import uniform_grid

__all__ = [
    "REFERENCE_ANGLES",
    "AngleEstimate",
    "apply_rotation",
    "extra_rotation",
    "find_angle",
    "maximize_overlap",
    "overlap_landscape",
]

log = logging.getLogger(__name__)

# (state family, time fraction of T_rev, j, phi / pi)
REFERENCE_ANGLES = (
    ("cat", Fraction(1, 4), 38, 0.16),
    ("cat", Fraction(1, 4), 82, 0.72),
    ("cat", Fraction(1, 4), 104, 1.16),
    ("cat", Fraction(1, 4), 126, 1.71),
    ("cat", Fraction(1, 4), 142, 2.16),
    ("cat", Fraction(1, 4), 160, 2.77),
    ("compass", Fraction(1, 8), 64, 0.22),
    ("compass", Fraction(1, 8), 116, 0.72),
    ("compass", Fraction(1, 8), 150, 1.21),
)

COARSE_SAMPLES = 600
ANGLE_TOL = 1e-4 * math.pi
CONTINUATION_STRIDE = 4
FLAT_OVERLAP = 0.1
MIN_PEAK_RATIO = 0.05


@dataclass(frozen=True)
class AngleEstimate:
    """Rotation angle phi (radians, >= 0) that best maps the j=0 packet onto level j.

    ``branch`` is the number of whole turns added to the principal angle
    by continuation in j.
    """

    j: int
    time_fraction: Fraction
    phi: float
    peak_overlap: float
    extra_rotation: float
    branch: int = 0

    @property
    def phi_over_pi(self) -> float:
        return self.phi / math.pi


def _phase_exponent(basis0: EigenBasis, lambda_bar_ref: float, include_global_phase: bool):
    n = np.arange(basis0.n_max + 1, dtype=float)
    return n - lambda_bar_ref + 0.5 if include_global_phase else n


def apply_rotation(
    basis0: EigenBasis,
    spec0: CoherentStateSpec,
    phi: float,
    t: float,
    lambda_bar_ref: float,
    *,
    include_global_phase: bool = True,
) -> WavePacket:
    """chi = sum_n d_n exp(i m_n phi) psi_n exp(-i E_n t), m_n = n - lambda_bar_ref + 1/2."""
    if spec0.n_max != basis0.n_max:
        raise DomainError("spec0 was not built on basis0")
    m = _phase_exponent(basis0, lambda_bar_ref, include_global_phase)
    coeff = spec0.weights * np.exp(1j * m * phi - 1j * basis0.energies * t)
    return WavePacket(
        grid=basis0.grid,
        amplitudes=coeff @ basis0.psi,
        time=float(t),
        spec=spec0,
        coefficients=coeff,
        label=f"rotated j=0 by {phi / math.pi:.6g} pi",
    )


def overlap_landscape(coeff0: np.ndarray, projections: np.ndarray):
    """phi -> |<chi(phi)|target>|^2.

    ``coeff0`` are the un-rotated j=0 amplitudes at time t and
    ``projections[n] = <psi_n0|target>``. Only the n-dependent part of the
    rotation phase matters, so the landscape is the trigonometric
    polynomial |sum_n v_n exp(-i n phi)|^2 and is exactly 2 pi periodic.
    """
    v = np.conj(coeff0) * projections
    n = np.arange(v.size)

    def f(phi):
        phi = np.asarray(phi, dtype=float)
        return np.abs(np.exp(-1j * np.multiply.outer(phi, n)) @ v) ** 2

    return f


def _refine(f, phi0: float, step: float) -> tuple[float, float]:
    res = minimize_scalar(
        lambda x: -float(f(x)),
        bounds=(phi0 - step, phi0 + step),
        method="bounded",
        options={"xatol": ANGLE_TOL / 4},
    )
    phi = float(res.x) % (2.0 * math.pi)
    return phi, float(f(phi))


def _local_maxima(f) -> list[tuple[float, float]]:
    """Refined local maxima of a 2 pi periodic landscape, highest first.

    Ripples below ``MIN_PEAK_RATIO`` of the highest sample are ignored.
    """
    grid = np.linspace(0.0, 2.0 * math.pi, COARSE_SAMPLES, endpoint=False)
    vals = f(grid)
    idx = np.flatnonzero((vals > np.roll(vals, 1)) & (vals >= np.roll(vals, -1)))
    step = grid[1] - grid[0]
    keep = idx[vals[idx] >= MIN_PEAK_RATIO * vals.max()]
    peaks = [_refine(f, grid[i], step) for i in keep]
    return sorted(peaks, key=lambda pk: -pk[1])


def _maximize(f) -> tuple[float, float]:
    return _local_maxima(f)[0]


def maximize_overlap(
    basis0: EigenBasis,
    spec0: CoherentStateSpec,
    target: WavePacket,
    t: float,
) -> tuple[float, float]:
    """Principal angle in [0, 2 pi) maximizing |<chi(phi)|target>|^2, and that overlap.

    ``target`` must live on ``basis0``'s grid. Coarse search on
    ``COARSE_SAMPLES`` points, then bounded Brent refinement.
    """
    coeff0 = spec0.weights * np.exp(-1j * basis0.energies * t)
    proj = (basis0.psi * basis0.grid.weights) @ target.amplitudes
    return _maximize(overlap_landscape(coeff0, proj))


def _union_grid(c0: RotorConstants, cj: RotorConstants):
    g0, gj = default_grid(c0), default_grid(cj)
    step = min(g0.step, gj.step)
    left = min(g0.points[0], gj.points[0])
    right = max(g0.points[-1], gj.points[-1])
    n = int(math.ceil((right - left) / step))
    n += n % 2
    return uniform_grid(left, left + n * step, n + 1)


def _landscape(params, j, frac, alpha, equilibrium):
    c0 = rotor_constants(params, 0, equilibrium)
    cj = rotor_constants(params, j, equilibrium)
    grid = _union_grid(c0, cj)
    b0, bj = build_basis(c0, grid), build_basis(cj, grid)
    s0, sj = cs_weights(b0, alpha), cs_weights(bj, alpha)
    t = float(frac) * periods(cj)[1]
    target = sj.weights * np.exp(-1j * bj.energies * t)
    overlap_matrix = (b0.psi * grid.weights) @ bj.psi.T
    coeff0 = s0.weights * np.exp(-1j * b0.energies * t)
    return overlap_landscape(coeff0, overlap_matrix @ target)


def _nearest_branch(peaks, guess):
    best = None
    for phi, val in peaks:
        cand = phi + 2.0 * math.pi * round((guess - phi) / (2.0 * math.pi))
        if best is None or abs(cand - guess) < abs(best[0] - guess):
            best = (cand, val)
    return best


def find_angle(
    params: MoleculeParams,
    j: int,
    time_fraction,
    alpha: float = 1.6,
    *,
    equilibrium: str = "semianalytic",
    stride: int = CONTINUATION_STRIDE,
) -> AngleEstimate:
    """Rotation angle for level ``j`` at ``time_fraction`` * T_rev.

    The overlap fixes phi only modulo 2 pi, and cat or compass states give
    further near-equal maxima a half or quarter turn apart. The angle is
    therefore followed from j = 0 (phi = 0) up to ``j`` in steps of at most
    ``stride``: at each step the local maximum closest to the linearly
    extrapolated angle is taken, on whichever 2 pi branch lies nearest.
    """
    if int(j) != j or j < 1:
        raise DomainError("target j must be a positive integer")
    frac = Fraction(time_fraction)
    hist = [(0, 0.0)]
    peak = 0.0
    for jj in list(range(stride, j, stride)) + [j]:
        guess = hist[-1][1]
        if len(hist) > 1:
            (ja, pa), (jb, pb) = hist[-2], hist[-1]
            guess = pb + (pb - pa) / (jb - ja) * (jj - jb)
        phi, peak = _nearest_branch(_local_maxima(_landscape(params, jj, frac, alpha, equilibrium)), guess)
        hist.append((jj, phi))
    phi = hist[-1][1]
    if peak < FLAT_OVERLAP:
        log.warning("j=%d: peak overlap %.3f is small; the angle is unreliable", j, peak)
    extra = extra_rotation(rotor_constants(params, 0, equilibrium), frac)
    return AngleEstimate(
        j=int(j),
        time_fraction=frac,
        phi=phi,
        peak_overlap=min(max(peak, 0.0), 1.0),
        extra_rotation=extra,
        branch=math.floor(phi / (2.0 * math.pi)),
    )


def extra_rotation(constants: RotorConstants, time_fraction) -> float:
    """Counter-clockwise lag of the packet behind the nearest commensurate orbit count.

    With R = T_rev / T_cl and tf the time fraction, the packet completes
    tf * R classical orbits; the returned angle is 2 pi tf (round(R) - R).
    It vanishes when R is an integer.
    """
    t_cl, t_rev = periods(constants)
    ratio = t_rev / t_cl
    return 2.0 * math.pi * float(Fraction(time_fraction)) * (round(ratio) - ratio)
