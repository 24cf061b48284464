"""Exceptions raised by crystal-automaton."""


class AutomatonError(Exception):
    """Base class for every error raised by this package."""


class ArgumentError(AutomatonError, ValueError):
    """Invalid index, rank mismatch, malformed word or inconsistent parameters."""


class SizeGuardError(ArgumentError):
    """An exhaustive enumeration would exceed the configured size guard."""


class ConsistencyError(AutomatonError, RuntimeError):
    """An internal self-check failed. Always a bug, never bad input."""


class RunawayError(AutomatonError, RuntimeError):
    """The carrier did not return to the vacuum within the extension cap."""


class IntegrityError(AutomatonError, ValueError):
    """A recorded evolution violates the vertex relation."""

    def __init__(self, message: str, site: tuple[int, int] | None = None):
        super().__init__(message)
        self.site = site


class ScatterTimeout(AutomatonError, TimeoutError):
    """A scattering experiment did not separate within its step budget."""


class SolutionValidityError(AutomatonError, ValueError):
    """A tau function produced a negative occupation number."""

    def __init__(self, message: str, site: tuple[int, int, int] | None = None):
        super().__init__(message)
        self.site = site


class VerificationError(AutomatonError):
    """A verification check found a mismatch with the expected outcome."""
