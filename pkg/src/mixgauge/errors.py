"""Exception hierarchy.

Every precondition violation raised by the library derives from
``MixGaugeError`` so the CLI can map it to a single exit status.
"""


class MixGaugeError(Exception):
    """Base class for all library errors."""


class DomainError(MixGaugeError, ValueError):
    """Argument outside the mathematical domain (negative radius, t <= 0, ...)."""


class GeometryError(MixGaugeError, ValueError):
    """Invalid shape: self-intersecting polygon, degenerate interval, bad family parameters."""


class UnsupportedDimensionError(MixGaugeError, ValueError):
    pass


class FrameError(MixGaugeError, ValueError):
    """Shape is not contained in the requested root frame."""


class ResourceError(MixGaugeError, ValueError):
    """Requested depth exceeds the hard limit."""


class PreconditionError(MixGaugeError, ValueError):
    pass


class CoverageError(MixGaugeError, ValueError):
    """A family of cells does not cover the shape it is supposed to cover."""
