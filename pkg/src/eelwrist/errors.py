"""Exception types raised by the toolkit.

Everything derives from :class:`WristError` so the CLI can map domain
failures to a single exit status.
"""


class WristError(Exception):
    """Base class for domain errors (unreachable poses, singularities, ...)."""


class InvalidGeometry(WristError, ValueError):
    pass


class Unreachable(WristError):
    """No real joint (or orientation) solution exists.

    ``leg`` is 1 or 2 when a specific leg cannot close, ``None`` otherwise.
    """

    def __init__(self, message, leg=None):
        super().__init__(message)
        self.leg = leg


class IndeterminateLeg(Unreachable):
    """The leg closes for every crank angle (platform point on the crank axis)."""


class ModeVanished(WristError):
    """The requested working mode degenerates (double root of a leg)."""

    def __init__(self, message, leg=None):
        super().__init__(message)
        self.leg = leg


class AmbiguousSelection(WristError):
    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = list(candidates)


class NoConvergence(WristError):
    pass


class SerialSingular(WristError):
    pass


class DegenerateSegment(WristError, ValueError):
    pass


class DegenerateSlice(WristError):
    pass


class CenterInfeasible(WristError):
    pass


class EmptyWorkspace(WristError):
    pass


class ConfigError(WristError, ValueError):
    pass
