"""Exception hierarchy shared by all modlift modules."""


class ModliftError(Exception):
    """Base class for every error raised by modlift."""


class GridMismatchError(ModliftError, ValueError):
    """Operands live on different grids or have the wrong shape."""


class DegenerateWindowError(ModliftError, ValueError):
    """A window (or localizing bump) is identically zero."""


class ParameterError(ModliftError, ValueError):
    """A numeric parameter is outside its admissible range."""


class SingularOperatorError(ModliftError, ArithmeticError):
    """A matrix is too ill-conditioned to invert reliably."""

    def __init__(self, message, smallest_singular_value=None):
        super().__init__(message)
        self.smallest_singular_value = smallest_singular_value


class SpecParseError(ModliftError, ValueError):
    """A weight, window, exponent or config string cannot be parsed."""
