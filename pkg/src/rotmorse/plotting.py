"""Static figures for the CLI report path.

Figures are built on bare ``matplotlib.figure.Figure`` objects with the Agg
canvas, so nothing touches pyplot's global state and no display is needed.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.colors import TwoSlopeNorm
from matplotlib.figure import Figure

from .eigen import EigenBasis
from .phase_space import WignerField
from .rotor import effective_potential

__all__ = ["plot_angles", "plot_density", "plot_eigen", "plot_fit", "plot_scan", "plot_wigner"]

# PNG metadata would otherwise embed the matplotlib version string
_META = {"Software": None}


def _figure(width=6.0, height=4.0):
    fig = Figure(figsize=(width, height), dpi=120)
    FigureCanvasAgg(fig)
    return fig, fig.add_subplot(1, 1, 1)


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, metadata=_META)
    return path


def plot_eigen(basis: EigenBasis, path, n_show: int = 6, scale: float | None = None) -> Path:
    """Effective potential, bound levels and the lowest ``n_show`` wavefunctions."""
    const = basis.constants
    r = basis.grid.points
    fig, ax = _figure()
    v = effective_potential(const.params, const.j, r)
    ax.plot(r, v, color="k", lw=1.2, label=r"$V_\mathrm{eff}$")
    E = basis.energies
    if scale is None:
        scale = 0.6 * (E[1] - E[0])
    for n, e in enumerate(E):
        ax.hlines(e, r[0], r[-1], color="0.85", lw=0.5)
        if n < n_show:
            ax.plot(r, e + scale * basis.psi[n] / np.abs(basis.psi[n]).max(), lw=0.9)
    ax.set_xlim(r[0], min(r[-1], const.r_j + 6.0 / const.params.beta))
    ax.set_ylim(1.1 * E.min() - 0.1 * const.params.D, 0.1 * const.params.D)
    ax.set_xlabel("r (bohr)")
    ax.set_ylabel("E (hartree)")
    ax.set_title(f"j = {const.j}: {basis.n_max + 1} bound states")
    return _save(fig, path)


def plot_density(r, density, path, *, title: str = "", peaks=()) -> Path:
    fig, ax = _figure()
    ax.plot(r, density, lw=1.0)
    for x, y in peaks:
        ax.plot(x, y, "v", color="C3", ms=4)
    ax.set_xlabel("r (bohr)")
    ax.set_ylabel(r"$|\Phi|^2$ (1/bohr)")
    ax.set_title(title)
    return _save(fig, path)


def plot_wigner(field: WignerField, path, *, title: str = "") -> Path:
    fig, ax = _figure(6.0, 4.5)
    vmax = np.abs(field.values).max()
    mesh = ax.pcolormesh(
        field.r_axis,
        field.p_axis,
        field.values.T,
        cmap="RdBu_r",
        norm=TwoSlopeNorm(0.0, -vmax, vmax),
        shading="auto",
        rasterized=True,
    )
    fig.colorbar(mesh, ax=ax, label="W")
    ax.set_xlabel("r (bohr)")
    ax.set_ylabel("p (a.u.)")
    ax.set_title(title)
    return _save(fig, path)


def plot_scan(records, minima, path, *, title: str = "") -> Path:
    ok = [rec for rec in records if rec.error is None]
    fig, ax = _figure()
    ax.plot([rec.j for rec in ok], [rec.inv_action for rec in ok], ".-", ms=3, lw=0.8)
    for j, val, _ in minima:
        ax.plot(j, val, "o", mfc="none", color="C3")
    ax.set_xlabel("j")
    ax.set_ylabel(r"$1/(\Delta x\,\Delta p)$")
    ax.set_title(title)
    return _save(fig, path)


def plot_fit(points, fit, path) -> Path:
    """Tile area against 1/action on log axes with the fitted power law."""
    x, y = np.asarray(points, dtype=float).T
    fig, ax = _figure()
    ax.loglog(x, y, "o")
    xs = np.geomspace(x.min() * 0.98, x.max() * 1.02, 50)
    ax.loglog(xs, np.exp(fit.intercept) * xs**fit.slope, "-", lw=1, label=f"slope {fit.slope:.3f}")
    ax.loglog(xs, fit.factor * xs, "--", lw=1, label=f"{fit.factor:.3f} / A")
    ax.set_xlabel("1/action")
    ax.set_ylabel("tile area")
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_angles(estimates, path, reference=None) -> Path:
    fig, ax = _figure()
    js = [e.j for e in estimates]
    ax.plot(js, [e.phi / math.pi for e in estimates], "o", label="computed")
    if reference:
        ax.plot(list(reference), list(reference.values()), "x", color="k", label="reference")
        ax.legend(frameon=False)
    ax.set_xlabel("j")
    ax.set_ylabel(r"$\varphi/\pi$")
    return _save(fig, path)
