"""Classical action, sub-Planck tile areas, j-scans and the scaling fit."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import ndimage, optimize

from .coherent import WavePacket, cs_weights, evolve, periods
from .eigen import build_basis, default_grid
from .errors import DegenerateError, ModelError, NoTileError
from .phase_space import WignerField, wigner
from .rotor import MoleculeParams, rotor_constants

__all__ = [
    "ScalingFit",
    "SensitivityRecord",
    "classical_action",
    "find_minima",
    "fringe_wavevectors",
    "packet_at",
    "scaling_fit",
    "sensitivity_scan",
    "tile_area",
]

log = logging.getLogger(__name__)

REFERENCE_JS = (0, 64, 94, 116, 136, 150)


@dataclass(frozen=True)
class SensitivityRecord:
    j: int
    time_fraction: Fraction
    delta_x: float
    delta_p: float
    action: float
    inv_action: float
    tile_area: float | None = None
    error: str | None = None


@dataclass(frozen=True)
class ScalingFit:
    """log(tile) = slope * log(1/A) + intercept; tile ~ factor / A."""

    slope: float
    factor: float
    residual: float
    intercept: float
    n: int


def classical_action(packet: WavePacket) -> tuple[float, float, float]:
    """(delta_x, delta_p, delta_x * delta_p) of a packet.

    Momentum moments use the spectral derivative on the packet grid, which
    is exact for band-limited samples that vanish at both ends.
    """
    grid = packet.grid
    phi = packet.amplitudes
    rho = np.abs(phi) ** 2
    norm = grid.integrate(rho)
    mx = grid.integrate(grid.points * rho) / norm
    vx = grid.integrate((grid.points - mx) ** 2 * rho) / norm
    k = 2.0 * math.pi * np.fft.fftfreq(grid.size, grid.step)
    dphi = np.fft.ifft(1j * k * np.fft.fft(phi))
    mp = (grid.integrate(np.conj(phi) * (-1j) * dphi) / norm).real
    p2 = grid.integrate(np.abs(dphi) ** 2) / norm
    dx = math.sqrt(vx)
    dp = math.sqrt(max(p2 - mp * mp, 0.0))
    return dx, dp, dx * dp


def _region_slice(field: WignerField, region):
    mr, mp, sr, sp = field.moments()
    if region is None:
        region = (mr - 1.2 * sr, mr + 1.2 * sr, mp - 1.2 * sp, mp + 1.2 * sp)
    r_lo, r_hi, p_lo, p_hi = region
    ri = np.flatnonzero((field.r_axis >= r_lo) & (field.r_axis <= r_hi))
    pi_ = np.flatnonzero((field.p_axis >= p_lo) & (field.p_axis <= p_hi))
    if ri.size < 8 or pi_.size < 8:
        raise NoTileError("region holds too few field samples")
    centre = (0.5 * (r_lo + r_hi), 0.5 * (p_lo + p_hi))
    return ri, pi_, centre, (sr, sp)


def fringe_wavevectors(field: WignerField, region=None, *, window: float = 0.25, min_ratio: float = 0.2):
    """The two dominant interference wavevectors near the region centre.

    Works in coordinates scaled by the state's spreads; the field is tapered
    with a Gaussian of width ``window`` (scaled units) about the region
    centre, the strongest Fourier component is located on a zero-padded FFT
    and polished by direct maximization, then the strongest component at
    least 30 degrees away from it is found the same way. Returns physical
    wavevectors (k_r in 1/bohr, k_p in 1/a.u.) and the amplitude ratio.
    Raises ``NoTileError`` if the second family is weaker than
    ``min_ratio`` of the first (a single fringe family has no closed tiles).
    """
    ri, pi_, (rc, pc), (sr, sp) = _region_slice(field, region)
    X = (field.r_axis[ri] - rc) / sr
    P = (field.p_axis[pi_] - pc) / sp
    taper = np.exp(-(X[:, None] ** 2 + P[None, :] ** 2) / (2 * window**2))
    G = field.values[np.ix_(ri, pi_)] * taper

    n_fft = 1024
    F = np.abs(np.fft.fftshift(np.fft.fft2(G, s=(n_fft, n_fft))))
    kx = np.fft.fftshift(np.fft.fftfreq(n_fft, X[1] - X[0])) * 2 * math.pi
    kp = np.fft.fftshift(np.fft.fftfreq(n_fft, P[1] - P[0])) * 2 * math.pi
    KX, KP = np.meshgrid(kx, kp, indexing="ij")
    # W is real, so half the plane suffices; drop the envelope near k = 0
    k_min = 4.0 / window
    F[(np.hypot(KX, KP) < k_min) | (KP < 0) | ((KP == 0) & (KX < 0))] = 0.0
    if F.max() <= 1e-12 * np.abs(G).sum():
        raise NoTileError("no interference fringes near the region centre")

    def spectrum(k):
        return abs(np.exp(-1j * k[0] * X) @ G @ np.exp(-1j * k[1] * P))

    def polish(k0):
        res = optimize.minimize(lambda k: -spectrum(k), k0, method="Nelder-Mead",
                                options={"xatol": 1e-6, "fatol": 1e-12 * spectrum(k0)})
        return res.x, -res.fun

    i1 = np.unravel_index(np.argmax(F), F.shape)
    k1, a1 = polish(np.array([KX[i1], KP[i1]]))
    cosang = np.abs(KX * k1[0] + KP * k1[1]) / (np.hypot(KX, KP) * np.hypot(*k1) + 1e-300)
    F2 = np.where(cosang < math.cos(math.radians(30)), F, 0.0)
    if not F2.any():
        raise NoTileError("no second fringe family")
    i2 = np.unravel_index(np.argmax(F2), F2.shape)
    k2, a2 = polish(np.array([KX[i2], KP[i2]]))
    ratio = a2 / a1
    if ratio < min_ratio:
        raise NoTileError(f"second fringe family too weak (ratio {ratio:.3f})")
    cross = abs(k1[0] * k2[1] - k1[1] * k2[0])
    if min(np.hypot(*k1), np.hypot(*k2)) < k_min or cross < 0.25 * np.hypot(*k1) * np.hypot(*k2):
        raise NoTileError("fringe wavevectors are too slow or nearly parallel")
    return np.array([k1[0] / sr, k1[1] / sp]), np.array([k2[0] / sr, k2[1] / sp]), ratio


def _zero_span(x, v, i0):
    s = np.sign(v[i0])
    i = i0
    while i < len(v) - 1 and np.sign(v[i + 1]) == s:
        i += 1
    if i == len(v) - 1:
        return None
    right = x[i] + (x[i + 1] - x[i]) * v[i] / (v[i] - v[i + 1])
    i = i0
    while i > 0 and np.sign(v[i - 1]) == s:
        i -= 1
    if i == 0:
        return None
    left = x[i - 1] + (x[i] - x[i - 1]) * v[i - 1] / (v[i - 1] - v[i])
    return right - left


def _tile_area_cuts(field, region, n_tiles, threshold=0.15):
    ri, pi_, (rc, pc), (sr, sp) = _region_slice(field, region)
    W = field.values
    sub = W[np.ix_(ri, pi_)]
    big = np.abs(sub) > threshold * np.abs(sub).max()
    ext = big & (
        ((sub == ndimage.maximum_filter(sub, 5)) & (sub > 0))
        | ((sub == ndimage.minimum_filter(sub, 5)) & (sub < 0))
    )
    a, b = np.nonzero(ext)
    dist = np.hypot((field.r_axis[ri[a]] - rc) / sr, (field.p_axis[pi_[b]] - pc) / sp)
    areas, signs = [], []
    for q in np.argsort(dist):
        i, k = ri[a[q]], pi_[b[q]]
        lr = _zero_span(field.r_axis, W[:, k], i)
        lp = _zero_span(field.p_axis, W[i, :], k)
        if lr is None or lp is None:
            continue
        areas.append(lr * lp)
        signs.append(np.sign(W[i, k]))
        if len(areas) == n_tiles:
            break
    if len(areas) < n_tiles or len(set(signs)) < 2:
        raise NoTileError(f"found {len(areas)} measurable tiles, need {n_tiles} of both signs")
    return float(np.mean(areas))


def tile_area(field: WignerField, region=None, *, method: str = "fringe", n_tiles: int = 3) -> float:
    """Area of the sub-Planck interference tiles near the phase-space centre.

    ``region`` is (r_lo, r_hi, p_lo, p_hi); by default a box of +-1.2
    spreads about the centroid.

    ``method="fringe"`` (default) takes the two dominant fringe wavevectors
    k1, k2 of the central pattern; the zero lines of cos(k1.z) + cos(k2.z)
    bound parallelogram cells of area 2 pi^2 / |k1 x k2|. This does not
    depend on how the tiles are oriented.

    ``method="cuts"`` averages, over ``n_tiles`` extrema nearest the centre,
    the product of zero-to-zero widths along r and p through each extremum.
    Only meaningful for axis-aligned rectangular tiles.
    """
    if method == "fringe":
        k1, k2, _ = fringe_wavevectors(field, region)
        return 2.0 * math.pi**2 / abs(k1[0] * k2[1] - k1[1] * k2[0])
    if method == "cuts":
        return _tile_area_cuts(field, region, n_tiles)
    raise ValueError(f"unknown tile method {method!r}")


def packet_at(params: MoleculeParams, j: int, time_fraction, alpha=1.6, *, equilibrium="semianalytic", n_points=None):
    """Coherent state of level ``j`` evolved to ``time_fraction`` * T_rev."""
    const = rotor_constants(params, j, equilibrium)
    grid = default_grid(const) if n_points is None else default_grid(const, n_points)
    basis = build_basis(const, grid)
    spec = cs_weights(basis, alpha)
    _, t_rev = periods(const)
    return evolve(basis, spec, float(Fraction(time_fraction)) * t_rev)


def _scan_one(params, j, frac, alpha, with_tile, equilibrium, n_points, grid_p):
    try:
        pk = packet_at(params, j, frac, alpha, equilibrium=equilibrium, n_points=n_points)
        dx, dp, act = classical_action(pk)
        tile = tile_area(wigner(pk, grid_p=grid_p)) if with_tile else None
        return SensitivityRecord(j, frac, dx, dp, act, 1.0 / act, tile)
    except ModelError as exc:
        log.warning("j=%d skipped: %s", j, exc)
        nan = float("nan")
        return SensitivityRecord(j, frac, nan, nan, nan, nan, None, f"{type(exc).__name__}: {exc}")


def sensitivity_scan(
    params: MoleculeParams,
    j_values,
    time_fraction,
    alpha=1.6,
    *,
    reference_js=(),
    threads: int = 1,
    equilibrium: str = "semianalytic",
    n_points: int | None = None,
    grid_p: int = 512,
) -> list[SensitivityRecord]:
    """1/action for every j (fast path) and tile areas for ``reference_js``.

    Model errors for individual j are recorded in the ``error`` field with
    NaN numbers rather than aborting the scan. Results come back in j order
    whatever the thread count.
    """
    frac = Fraction(time_fraction)
    refs = set(reference_js)
    js = sorted(set(int(j) for j in j_values) | refs)

    def job(j):
        return _scan_one(params, j, frac, alpha, j in refs, equilibrium, n_points, grid_p)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(job, js))
    return [job(j) for j in js]


def scaling_fit(records, *, min_span: float = 1.05) -> ScalingFit:
    """Fit tile area against 1/action.

    ``records`` is a sequence of SensitivityRecord with tile areas, or of
    (inv_action, tile_area) pairs. Needs at least 4 points spanning a factor
    ``min_span`` in 1/action.
    """
    pairs = []
    for rec in records:
        if isinstance(rec, SensitivityRecord):
            if rec.tile_area is None or rec.error:
                continue
            pairs.append((rec.inv_action, rec.tile_area))
        else:
            pairs.append(tuple(rec))
    if len(pairs) < 4:
        raise DegenerateError(f"need at least 4 reference points, got {len(pairs)}")
    x, y = np.array(pairs, dtype=float).T
    if x.max() / x.min() < min_span:
        raise DegenerateError(f"1/action spans only a factor {x.max() / x.min():.3f}")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    return ScalingFit(
        slope=float(slope),
        factor=float(x @ y / (x @ x)),
        residual=float(np.sqrt(np.mean(resid**2))),
        intercept=float(intercept),
        n=len(pairs),
    )


def find_minima(records, key: str = "inv_action") -> list[tuple[int, float, float]]:
    """Interior local minima of ``key`` over j as (j, value, refined_j).

    A plateau reports its smallest j. ``refined_j`` is the vertex of the
    parabola through the three neighbouring points.
    """
    recs = [r for r in records if r.error is None]
    js = np.array([r.j for r in recs])
    v = np.array([getattr(r, key) for r in recs], dtype=float)
    out = []
    for i in range(1, len(v) - 1):
        if v[i] < v[i - 1] and v[i] <= v[i + 1]:
            curv = v[i - 1] - 2 * v[i] + v[i + 1]
            step = 0.5 * (js[i + 1] - js[i - 1])
            shift = 0.5 * (v[i - 1] - v[i + 1]) / curv * step if curv > 0 else 0.0
            out.append((int(js[i]), float(v[i]), float(js[i] + shift)))
    return out
