"""Exception types shared across the toolkit.

Every data-dependent failure raises a subclass of ChronotextError so the
command line layer can map them to a single exit code. Programming errors
(bad arguments to library functions) stay ordinary ValueError/TypeError.
"""

from __future__ import annotations


class ChronotextError(Exception):
    """Base class for all corpus and model errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


class YearOutOfRange(ChronotextError):
    pass


class UnknownDecadeCode(ChronotextError):
    pass


class MalformedRecord(ChronotextError):
    pass


class EmptyText(ChronotextError):
    pass


class DuplicateId(ChronotextError):
    pass


class AuthError(ChronotextError):
    pass


class RateLimited(ChronotextError):
    pass


class TransportError(ChronotextError):
    pass


class MalformedIndex(ChronotextError):
    pass


class InvalidUrl(ChronotextError):
    pass


class InvalidLimit(ChronotextError):
    pass


class UnknownGroup(ChronotextError):
    pass


class TooFewPerClass(ChronotextError):
    pass


class MissingText(ChronotextError):
    pass


class InvalidAlpha(ChronotextError):
    pass


class MissingClass(ChronotextError):
    pass


class UnknownLabel(ChronotextError):
    pass


class EmptyMatrix(ChronotextError):
    pass


class EmptyInput(ChronotextError):
    pass


class UnjoinableId(ChronotextError):
    pass


class NonFiniteScore(ChronotextError):
    pass
