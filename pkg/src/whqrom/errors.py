"""Exception types shared across the package."""


class WhqromError(ValueError):
    """Base class for all package errors."""


class RangeError(WhqromError):
    """A numeric input fell outside its admissible range."""


class ShapeError(WhqromError):
    """An array had the wrong length, shape, or alignment."""


class ScaleError(WhqromError):
    """A dense construction was requested beyond desk scale."""


class ConfigError(WhqromError):
    """A configuration value or file is invalid."""


class ParseError(WhqromError):
    """An input file could not be parsed."""


class GridError(WhqromError):
    """A quadrature grid is unphysical for the requested parameters."""


class SymmetryError(WhqromError):
    """An operator violates the symmetry a construction requires."""


class FitError(WhqromError):
    """A regression problem is rank deficient or under-determined."""


class ToleranceError(WhqromError):
    """A numerical self-check failed its stated tolerance."""
