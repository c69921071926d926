"""Exception types raised across the package."""


class PacsError(Exception):
    """Base class for all package errors."""


class DomainError(PacsError, ValueError):
    """An argument lies outside the domain of the operation."""


class TruncationError(PacsError):
    """The Fock-space cutoff is too small for the requested state or operation."""


class DivergentSNRError(PacsError, ArithmeticError):
    """Photon-number variance vanishes, so the signal-to-noise ratio diverges."""


class AccuracyError(PacsError):
    """A numerical integration cannot reach its stated accuracy on the given grid."""


class TruncationWarning(UserWarning):
    """A result was computed but the displaced state ran past the cutoff."""
