"""Exception hierarchy.

Every error raised on purpose by the library derives from :class:`CocoError`
so callers (and the CLI) can separate model errors from programming errors.
"""


class CocoError(Exception):
    """Base class for all library errors."""


class NetworkError(CocoError, ValueError):
    """A candidate network violates one of the standing assumptions."""


class DimensionMismatch(NetworkError):
    pass


class NegativeShareCount(NetworkError):
    pass


class NegativeValue(NetworkError):
    """Negative (or non-finite) credit amount or conversion threshold."""


class SelfHolding(NetworkError):
    pass


class ColumnSumExceeded(NetworkError):
    pass


class BadWeight(NetworkError):
    pass


class InvalidPartition(CocoError, ValueError):
    pass


class NegativeShift(CocoError, ValueError):
    pass


class SingularSystem(CocoError):
    pass


class SingularIminusW(CocoError):
    pass


class TooManyBanks(CocoError):
    pass


class NoConvergence(CocoError):
    pass


class NotFair(CocoError):
    pass


class NotSubFair(CocoError):
    pass


class NotSuperFair(CocoError):
    pass


class InternalInvariantBroken(CocoError):
    """A set inclusion guaranteed by the theory failed; points at tolerance trouble."""
