"""Coherent-state wave packets in the rotating Morse well and their phase-space sensitivity."""

from .coherent import WavePacket, cs_weights, evolve, periods
from .eigen import build_basis, eigen_energy
from .errors import (
    ConfigError,
    DegenerateError,
    DomainError,
    GridMismatchError,
    ModelError,
    NoRootError,
    NoTileError,
    NumericalToleranceError,
    ResolutionError,
    RotMorseError,
)
from .phase_space import WignerField, overlap_position, overlap_wigner, wigner
from .rotation import AngleEstimate, apply_rotation, extra_rotation, find_angle
from .rotor import I2, MoleculeParams, load_molecule, rotor_constants
from .sensitivity import classical_action, scaling_fit, sensitivity_scan, tile_area

__version__ = "0.1.0"

__all__ = [
    "I2",
    "AngleEstimate",
    "ConfigError",
    "DegenerateError",
    "DomainError",
    "GridMismatchError",
    "ModelError",
    "MoleculeParams",
    "NoRootError",
    "NoTileError",
    "NumericalToleranceError",
    "ResolutionError",
    "RotMorseError",
    "WavePacket",
    "WignerField",
    "apply_rotation",
    "build_basis",
    "classical_action",
    "cs_weights",
    "eigen_energy",
    "evolve",
    "extra_rotation",
    "find_angle",
    "load_molecule",
    "overlap_position",
    "overlap_wigner",
    "periods",
    "rotor_constants",
    "scaling_fit",
    "sensitivity_scan",
    "tile_area",
    "wigner",
]
