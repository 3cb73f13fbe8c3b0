"""Rotating Morse effective potential and its j-dependent constants.

Atomic units throughout (hbar = 1): lengths in bohr, energies in hartree,
masses in electron masses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .errors import ConfigError, DomainError, NoRootError

__all__ = [
    "I2",
    "MoleculeParams",
    "RotorConstants",
    "effective_force",
    "effective_potential",
    "equilibrium_numeric",
    "equilibrium_semianalytic",
    "load_molecule",
    "rotor_constants",
]


@dataclass(frozen=True)
class MoleculeParams:
    """Morse parameters of a diatomic.

    D: dissociation energy (hartree), beta: range parameter (1/bohr),
    r0: equilibrium separation (bohr), mu: reduced mass (electron masses).
    """

    D: float
    beta: float
    r0: float
    mu: float

    def __post_init__(self):
        for name in ("D", "beta", "r0", "mu"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be finite and positive, got {value!r}")
        if self.lambda0 <= 1.0:
            raise ConfigError(f"no bound state at j=0 (lambda0={self.lambda0:.4g} <= 1)")

    @property
    def lambda0(self) -> float:
        return math.sqrt(2.0 * self.mu * self.D) / self.beta


I2 = MoleculeParams(D=0.0198, beta=0.9605, r0=5.716, mu=11.56e4)

PROFILES = {"i2": I2}


def load_molecule(spec: str | Path) -> MoleculeParams:
    """Resolve a profile name (``"i2"``) or a key-value parameter file.

    The file holds one ``key = value`` pair per line for D, beta, r0, mu;
    ``#`` starts a comment.
    """
    key = str(spec).strip()
    if key.lower() in PROFILES:
        return PROFILES[key.lower()]
    path = Path(key)
    if not path.is_file():
        raise ConfigError(f"unknown molecule profile or missing file: {spec}")
    values = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            name, _, val = line.partition("=")
        else:
            parts = line.split()
            if len(parts) != 2:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            name, val = parts
        name = name.strip()
        if name not in ("D", "beta", "r0", "mu"):
            raise ConfigError(f"{path}:{lineno}: unknown key {name!r}")
        try:
            values[name] = float(val)
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: not a number: {val.strip()!r}") from None
    missing = {"D", "beta", "r0", "mu"} - values.keys()
    if missing:
        raise ConfigError(f"{path}: missing keys {sorted(missing)}")
    return MoleculeParams(**values)


def _centrifugal(params: MoleculeParams, j: int, r):
    return j * (j + 1) / (2.0 * params.mu * r * r)


def effective_potential(params: MoleculeParams, j: int, r):
    """Morse well plus the centrifugal barrier j(j+1)/(2 mu r^2)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("r must be positive")
    e = np.exp(-params.beta * (r - params.r0))
    v = params.D * (e * e - 2.0 * e) + _centrifugal(params, j, r)
    return v if v.ndim else float(v)


def effective_force(params: MoleculeParams, j: int, r):
    """dV_eff/dr."""
    r = np.asarray(r, dtype=float)
    e = np.exp(-params.beta * (r - params.r0))
    dv = 2.0 * params.D * params.beta * (e - e * e) - j * (j + 1) / (params.mu * r**3)
    return dv if dv.ndim else float(dv)


def _check_j(j) -> int:
    if int(j) != j or j < 0:
        raise DomainError(f"j must be a non-negative integer, got {j!r}")
    return int(j)


def equilibrium_semianalytic(params: MoleculeParams, j: int) -> tuple[float, float]:
    """Shifted equilibrium r_j and well depth D_j from the first-order
    centrifugal correction."""
    j = _check_j(j)
    A = _centrifugal(params, j, params.r0)
    x = A / (params.beta**2 * params.r0**2 * params.D)
    return params.r0 * (1.0 + x), params.D - A * (1.0 - x)


def equilibrium_numeric(params: MoleculeParams, j: int, *, n_scan: int = 4000) -> float:
    """Root of dV_eff/dr = 0 closest to r0 on the outward side.

    V' is negative at r0 for j > 0; the minimum is the first place it turns
    non-negative. Beyond it lies the barrier maximum, which is why a plain
    [r0, 3 r0] bracket does not work.
    """
    j = _check_j(j)
    if j == 0:
        return params.r0
    r = np.linspace(params.r0, 3.0 * params.r0, n_scan)
    dv = effective_force(params, j, r)
    turn = np.flatnonzero((dv[:-1] < 0) & (dv[1:] >= 0))
    if turn.size == 0:
        raise NoRootError(f"V_eff has no local minimum for j={j}")
    i = turn[0]
    return brentq(
        lambda x: effective_force(params, j, x), r[i], r[i + 1], xtol=1e-13, rtol=1e-15, maxiter=200
    )


@dataclass(frozen=True)
class RotorConstants:
    """All j-dependent quantities of the quadratic-expanded rotor.

    Energies in hartree, lengths in bohr; u, b_j, lambda_j and
    lambda_bar_j are dimensionless.
    """

    params: MoleculeParams
    j: int
    A: float
    A_j: float
    r_j: float
    D_j: float
    u: float
    b_j: float
    c0: float
    c1: float
    c2: float
    lambda_j: float
    lambda_bar_j: float
    equilibrium: str = "semianalytic"

    @property
    def well_bottom(self) -> float:
        """Minimum of the expanded potential c0 - 2 c1 z + c2 z^2."""
        return self.c0 - self.c1**2 / self.c2


def rotor_constants(
    params: MoleculeParams, j: int, equilibrium: str = "semianalytic"
) -> RotorConstants:
    """Derived constants for rotational level ``j``.

    ``equilibrium`` selects how r_j is obtained: the closed-form
    ``"semianalytic"`` shift (default) or the ``"numeric"`` root of V'.
    Raises ``NoRootError`` when the well has vanished for this j.
    """
    j = _check_j(j)
    if equilibrium == "semianalytic":
        r_j, D_j = equilibrium_semianalytic(params, j)
    elif equilibrium == "numeric":
        r_j = equilibrium_numeric(params, j)
        D_j = -effective_potential(params, j, r_j)
    else:
        raise ConfigError(f"unknown equilibrium branch {equilibrium!r}")
    if D_j <= 0:
        raise NoRootError(f"well depth D_j={D_j:.3g} <= 0 for j={j}")

    A = _centrifugal(params, j, params.r0)
    A_j = _centrifugal(params, j, r_j)
    u = math.exp(-params.beta * (r_j - params.r0))
    b = 1.0 / (params.beta * r_j)
    c0 = 3 * A_j * b * b - 3 * A_j * b + A_j
    c1 = (3 * A_j * b * b - 2 * A_j * b + u * params.D) / u
    c2 = (3 * A_j * b * b - A_j * b + u * u * params.D) / (u * u)
    if c2 <= 0:
        raise NoRootError(f"expansion curvature c2={c2:.3g} <= 0 for j={j}")
    lam = math.sqrt(2.0 * params.mu * c2) / params.beta
    lam_bar = c1 / c2 * lam
    if lam_bar <= 0.5:
        raise NoRootError(f"no bound state for j={j} (lambda_bar={lam_bar:.4g})")
    return RotorConstants(
        params=params,
        j=j,
        A=A,
        A_j=A_j,
        r_j=r_j,
        D_j=D_j,
        u=u,
        b_j=b,
        c0=c0,
        c1=c1,
        c2=c2,
        lambda_j=lam,
        lambda_bar_j=lam_bar,
        equilibrium=equilibrium,
    )
