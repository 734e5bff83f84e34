"""Exception types shared across the package."""


class LevyMPError(Exception):
    """Base class for all package errors."""


class DomainError(LevyMPError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class NonFullSpectrum(LevyMPError, ValueError):
    """A stability exponent has an eigenvalue whose index falls outside (0, 2]."""


class AmbiguousJordan(LevyMPError):
    """The numerical rank test cannot decide the Jordan structure at the given
    tolerance; the singular values straddle the cutoff."""


class ValidityError(LevyMPError, ValueError):
    """Parameters violate the hypotheses under which an asymptotic statement holds."""


class ProposalMismatch(LevyMPError):
    """Importance weights show signs of infinite variance for the chosen proposal."""


class UnsupportedCase(LevyMPError):
    """The requested closed form is not available for this configuration."""
