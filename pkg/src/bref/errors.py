"""Exception types shared across the package."""


class BrefError(Exception):
    """Base class for package errors."""


class InvalidSpin(BrefError):
    """A spin quantum number is negative or not a half-integer."""


class DimensionTooLarge(BrefError):
    """A dense-vector construction was requested beyond its size cap."""


class MismatchedLengths(BrefError):
    """Per-party lists (settings, frame sizes) disagree in length."""


class DegenerateDesign(BrefError):
    """Too few distinct abscissae for the requested least-squares fit."""


class NoThresholdExists(BrefError):
    """The mixed-frame ratio problem has no interior solution."""


class ParseError(BrefError):
    """Malformed command-line parameter."""
