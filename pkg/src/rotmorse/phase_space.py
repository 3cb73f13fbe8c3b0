"""Wigner quasiprobability fields and phase-space overlaps (hbar = 1)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .coherent import WavePacket
from .errors import GridMismatchError, ModelError, ResolutionError

__all__ = [
    "WignerField",
    "common_axes",
    "default_p_axis",
    "lobe_orientation",
    "momentum_wavefunction",
    "overlap_position",
    "overlap_wigner",
    "rotate_field",
    "wigner",
]

SUPPORT_CUTOFF = 1e-10
MOMENTUM_TAIL = 1e-12


def _trapezoid_weights(x: np.ndarray) -> np.ndarray:
    h = x[1] - x[0]
    w = np.full(x.size, h)
    w[0] = w[-1] = 0.5 * h
    return w


@dataclass(frozen=True, eq=False)
class WignerField:
    """W(r, p) sampled on uniform axes; ``values[i, k]`` is W(r_i, p_k)."""

    r_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray
    time: float = 0.0
    source: dict = field(default_factory=dict)

    @property
    def dr(self) -> float:
        return float(self.r_axis[1] - self.r_axis[0])

    @property
    def dp(self) -> float:
        return float(self.p_axis[1] - self.p_axis[0])

    def integrate(self, values=None) -> float:
        v = self.values if values is None else values
        return float(_trapezoid_weights(self.r_axis) @ v @ _trapezoid_weights(self.p_axis))

    def norm(self) -> float:
        return self.integrate()

    def purity(self) -> float:
        """2 pi * integral of W^2; equals 1 for a pure state."""
        return 2.0 * math.pi * self.integrate(self.values**2)

    def position_marginal(self) -> np.ndarray:
        return self.values @ _trapezoid_weights(self.p_axis)

    def momentum_marginal(self) -> np.ndarray:
        return _trapezoid_weights(self.r_axis) @ self.values

    def same_axes(self, other: "WignerField") -> bool:
        return (
            self.values.shape == other.values.shape
            and np.allclose(self.r_axis, other.r_axis, rtol=0, atol=1e-12)
            and np.allclose(self.p_axis, other.p_axis, rtol=0, atol=1e-12)
        )

    def moments(self) -> tuple[float, float, float, float]:
        """(<r>, <p>, delta_r, delta_p) computed from the field."""
        rho_r = self.position_marginal()
        rho_p = self.momentum_marginal()
        wr, wp = _trapezoid_weights(self.r_axis), _trapezoid_weights(self.p_axis)
        norm = wr @ rho_r
        mr = wr @ (self.r_axis * rho_r) / norm
        mp = wp @ (self.p_axis * rho_p) / norm
        vr = wr @ ((self.r_axis - mr) ** 2 * rho_r) / norm
        vp = wp @ ((self.p_axis - mp) ** 2 * rho_p) / norm
        return float(mr), float(mp), math.sqrt(vr), math.sqrt(vp)


def momentum_wavefunction(packet: WavePacket, p) -> np.ndarray:
    """Phi~(p) = (2 pi)^(-1/2) * integral Phi(r) exp(-i p r) dr, by direct quadrature."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    kernel = np.exp(-1j * np.outer(p, packet.r))
    return kernel @ (packet.amplitudes * packet.grid.weights) / math.sqrt(2.0 * math.pi)


def _nyquist(packet: WavePacket) -> float:
    # the r' kernel exp(-2 i p r') is sampled at step h, so |2p| < pi/h
    return math.pi / (2.0 * packet.grid.step)


def _support(amplitudes: np.ndarray, cutoff: float = SUPPORT_CUTOFF) -> tuple[int, int]:
    mag = np.abs(amplitudes)
    idx = np.flatnonzero(mag > cutoff * mag.max())
    return int(idx[0]), int(idx[-1])


def default_p_axis(packets, grid_p: int = 512) -> np.ndarray:
    """Symmetric momentum axis wide enough for every packet's momentum tail.

    The half-width is the largest |p| where the momentum density still
    exceeds ``MOMENTUM_TAIL`` of its peak, padded by 10 % and clipped to the
    grid's Nyquist limit.
    """
    if isinstance(packets, WavePacket):
        packets = [packets]
    p_max = 0.0
    for pk in packets:
        nyq = _nyquist(pk)
        probe = np.linspace(-nyq, nyq, 2049)
        dens = np.abs(momentum_wavefunction(pk, probe)) ** 2
        keep = probe[dens > MOMENTUM_TAIL * dens.max()]
        p_max = max(p_max, min(1.1 * np.abs(keep).max(), nyq))
    return np.linspace(-p_max, p_max, grid_p)


def common_axes(packets, grid_r: int = 512, grid_p: int = 512) -> tuple[np.ndarray, np.ndarray]:
    """r and p axes that cover the support of all ``packets`` (same grid)."""
    base = packets[0].grid
    for pk in packets[1:]:
        if not base.same_as(pk.grid):
            raise GridMismatchError("packets must share a position grid")
    lo = min(_support(pk.amplitudes)[0] for pk in packets)
    hi = max(_support(pk.amplitudes)[1] for pk in packets)
    stride = max(1, math.ceil((hi - lo + 1) / grid_r))
    return base.points[lo : hi + 1 : stride], default_p_axis(packets, grid_p)


def wigner(
    packet: WavePacket,
    p_axis=None,
    *,
    r_axis=None,
    grid_r: int = 512,
    grid_p: int = 512,
) -> WignerField:
    """Wigner function W(r, p) = (1/pi) * integral conj(Phi(r - s)) Phi(r + s) exp(-2 i p s) ds.

    ``r_axis`` points must lie on the packet grid; the s-integral then uses
    grid samples directly (step h, trapezoid). By default ``r_axis`` covers
    the packet support with at most ``grid_r`` points and ``p_axis`` comes
    from ``default_p_axis``.
    """
    grid = packet.grid
    h = grid.step
    phi = packet.amplitudes
    lo, hi = _support(phi)
    if r_axis is None:
        stride = max(1, math.ceil((hi - lo + 1) / grid_r))
        r_idx = np.arange(lo, hi + 1, stride)
    else:
        r_axis = np.asarray(r_axis, dtype=float)
        pos = (r_axis - grid.points[0]) / h
        r_idx = np.rint(pos).astype(int)
        if np.any(np.abs(pos - r_idx) > 1e-6) or r_idx.min() < 0 or r_idx.max() >= grid.size:
            raise GridMismatchError("r_axis points must lie on the packet grid")
    if p_axis is None:
        p_axis = default_p_axis(packet, grid_p)
    p_axis = np.asarray(p_axis, dtype=float)
    if np.abs(p_axis).max() > _nyquist(packet) * (1 + 1e-12):
        raise ResolutionError(
            f"|p| up to {np.abs(p_axis).max():.4g} exceeds the grid limit {_nyquist(packet):.4g}"
        )

    reach = np.clip(np.minimum(r_idx - lo, hi - r_idx), 0, None)
    K = int(reach.max())
    k = np.arange(-K, K + 1)
    minus = r_idx[:, None] - k[None, :]
    plus = r_idx[:, None] + k[None, :]
    valid = np.abs(k)[None, :] <= reach[:, None]
    kernel_in = np.conj(phi[np.clip(minus, 0, grid.size - 1)]) * phi[np.clip(plus, 0, grid.size - 1)]
    kernel_in = np.where(valid, kernel_in, 0.0)
    phase = np.exp(-2j * np.outer(k * h, p_axis))
    values = (kernel_in @ phase).real * (h / math.pi)
    return WignerField(
        r_axis=grid.points[r_idx],
        p_axis=p_axis,
        values=values,
        time=packet.time,
        source={"label": packet.label, "j": None if packet.spec is None else packet.spec.j},
    )


def overlap_position(a: WavePacket, b: WavePacket) -> float:
    """|<a|b>|^2 by quadrature on the shared grid."""
    return abs(a.inner(b)) ** 2


def overlap_wigner(a: WignerField, b: WignerField) -> float:
    """2 pi * integral W_a W_b dr dp, the phase-space form of |<a|b>|^2.

    The prefactor is fixed by requiring pure-state self-overlap = 1.
    """
    if not a.same_axes(b):
        raise GridMismatchError("Wigner fields must share axes")
    return 2.0 * math.pi * a.integrate(a.values * b.values)


def _husimi_like(field: WignerField) -> tuple[np.ndarray, tuple[float, float, float, float]]:
    # Gaussian smoothing with sigma_r * sigma_p = 1/2 and the aspect ratio of
    # the state; washes out interference fringes, keeps the lobes.
    mr, mp, sr, sp = field.moments()
    action = sr * sp
    sig = (sr / math.sqrt(2 * action) / field.dr, sp / math.sqrt(2 * action) / abs(field.dp))
    return ndimage.gaussian_filter(field.values, sig, mode="constant"), (mr, mp, sr, sp)


def lobe_orientation(field: WignerField, n_lobes: int = 4, level: float = 0.5):
    """Angles of the ``n_lobes`` main lobes and their common orientation.

    Lobes are the heaviest connected regions of the smoothed field above
    ``level`` times its maximum. Angles are measured about the centroid in
    coordinates scaled by the state's own spreads, counter-clockwise from the
    +r axis. The orientation is the n-fold circular mean, in
    [-pi/n, pi/n).
    """
    Q, (mr, mp, sr, sp) = _husimi_like(field)
    labels, count = ndimage.label(Q > level * Q.max())
    if count < n_lobes:
        raise ModelError(f"found {count} lobes, expected {n_lobes}")
    idx = np.arange(1, count + 1)
    mass = ndimage.sum(Q, labels, idx)
    X = (field.r_axis - mr) / sr
    P = (field.p_axis - mp) / sp
    angles = []
    for lab in idx[np.argsort(mass)[::-1][:n_lobes]]:
        w = np.where(labels == lab, Q, 0.0)
        angles.append(math.atan2((w.sum(axis=0) @ P), (w.sum(axis=1) @ X)))
    angles = np.array(sorted(angles))
    orient = np.angle(np.exp(1j * n_lobes * angles).mean()) / n_lobes
    return angles, float(orient)


def rotate_field(field: WignerField, angle: float) -> WignerField:
    """Rotate W counter-clockwise by ``angle`` about its centroid.

    The rotation acts in coordinates scaled by the state's spreads, the same
    frame ``lobe_orientation`` measures angles in.
    """
    mr, mp, sr, sp = field.moments()
    X, P = np.meshgrid((field.r_axis - mr) / sr, (field.p_axis - mp) / sp, indexing="ij")
    c, s = math.cos(angle), math.sin(angle)
    Xs, Ps = c * X + s * P, -s * X + c * P
    ri = (mr + sr * Xs - field.r_axis[0]) / field.dr
    pi_ = (mp + sp * Ps - field.p_axis[0]) / field.dp
    vals = ndimage.map_coordinates(field.values, [ri, pi_], order=3, mode="constant", cval=0.0)
    return WignerField(field.r_axis, field.p_axis, vals, field.time, dict(field.source, rotated=angle))
