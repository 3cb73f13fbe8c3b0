"""Exception hierarchy shared by the library and the CLI.

The CLI maps each family onto an exit status: configuration problems exit
with 2, model-validity problems with 3 and numerical-tolerance failures
with 4.
"""


class RotMorseError(Exception):
    """Base class for all package errors."""


class ConfigError(RotMorseError, ValueError):
    """Malformed user input: bad profile, unparsable range, non-coprime time."""


class DomainError(RotMorseError, ValueError):
    """Argument outside the mathematical domain of a function."""


class ModelError(RotMorseError):
    """The physical model is not valid for the requested parameters."""


class NoRootError(ModelError):
    """The effective potential has no local minimum for this j."""


class DegenerateError(ModelError):
    """A derived quantity (period, fit) is undefined for the inputs."""


class NoTileError(ModelError):
    """No interference tiles were found in the requested phase-space region."""


class GridMismatchError(RotMorseError, ValueError):
    """Two objects that must share a grid do not."""


class ResolutionError(RotMorseError, ValueError):
    """Requested momentum axis exceeds what the position grid can resolve."""


class NumericalToleranceError(RotMorseError):
    """A self-check (normalization, purity, ...) missed its tolerance."""
