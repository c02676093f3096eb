"""Exception hierarchy.

Searches that can legitimately come up empty return ``None``; the classes
below are reserved for malformed input and violated preconditions.
"""


class PlanarDualError(Exception):
    """Base class for every error raised by this package."""


class UnknownEdge(PlanarDualError, KeyError):
    pass


class UnknownVertex(PlanarDualError, KeyError):
    pass


class BadAttachment(PlanarDualError, ValueError):
    pass


class BadRotation(PlanarDualError, ValueError):
    pass


class BadBijection(PlanarDualError, ValueError):
    pass


class DisconnectedPrimal(PlanarDualError, ValueError):
    pass


class NonPlanar(PlanarDualError, ValueError):
    pass


class TooLarge(PlanarDualError, ValueError):
    pass


class NothingToReduce(PlanarDualError, ValueError):
    pass


class NotA2Isomorphism(PlanarDualError, ValueError):
    pass


class NotAnAbstractDuality(PlanarDualError, ValueError):
    pass


class BadPDCode(PlanarDualError, ValueError):
    pass


class DisconnectedCheckerboard(PlanarDualError, ValueError):
    pass


class FormatError(PlanarDualError, ValueError):
    """Raised by the JSON/PD readers; the message names the offending field."""
