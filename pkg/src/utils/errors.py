"""
Exception hierarchy shared by the library and the command-line front end.
"""


class KappaPsiError(Exception):
    """Base class for every error raised by this package."""

    exit_code: int = 1


class UsageError(KappaPsiError):
    """Unparsable user input (multi-index text, tau lists, rationals, flags)."""

    exit_code = 1


class DomainError(KappaPsiError, ValueError):
    """A mathematically invalid request."""

    exit_code = 2


class UnstableKeyError(DomainError):
    """A correlator key with 2g - 2 + n <= 0."""


class VerificationFailure(KappaPsiError):
    """An identity check or an engine comparison did not hold exactly."""

    exit_code = 3


class CacheCorruptionError(KappaPsiError):
    """The persisted cache could not be trusted."""

    exit_code = 4


class CacheConsistencyError(CacheCorruptionError):
    """Attempt to overwrite a cached value with a different value."""


class UnsupportedEngineError(KappaPsiError):
    """The selected engine cannot evaluate the requested key."""

    exit_code = 5
