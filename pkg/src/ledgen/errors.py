"""Exception hierarchy shared across the package."""


class LedgenError(Exception):
    """Base class for all package errors."""


class ContractError(LedgenError):
    """A precondition or invariant was violated by the caller."""


class FormatError(LedgenError):
    """A file on disk does not match the expected encoding."""


class GenerationError(LedgenError):
    """Procedural generation could not satisfy the configured constraints."""


class MeasurementError(LedgenError):
    """A test-utility measurement found nothing to measure."""
