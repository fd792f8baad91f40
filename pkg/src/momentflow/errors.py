"""Exception types shared across the package."""


class MomentflowError(Exception):
    """Base class for all package errors."""


class InvalidProfileError(MomentflowError):
    """Raised when a bump profile violates its constraints (e.g. identically zero)."""


class SpecValidationError(MomentflowError):
    """Raised when a datum specification violates an admissibility constraint."""


class SupportOverlapError(SpecValidationError):
    """Raised when two Fourier bumps of a datum overlap."""


class UnderResolvedError(MomentflowError):
    """Raised when a grid or quadrature cannot resolve the requested data.

    Carries the name of the offending parameter in ``parameter``.
    """

    def __init__(self, message, parameter=None):
        super().__init__(message)
        self.parameter = parameter


class InvalidDesignError(MomentflowError):
    """Raised when design-system inputs are outside their domain."""


class ConditioningError(MomentflowError):
    """Raised when the design system is numerically singular."""

    def __init__(self, message, condition_number=None):
        super().__init__(message)
        self.condition_number = condition_number


class GridMismatchError(MomentflowError):
    """Raised when two spectral objects live on incompatible lattices."""


class DivergenceBlowupError(MomentflowError):
    """Raised when the time stepper detects unbounded norm growth."""


class ProfileVanishesError(MomentflowError):
    """Raised when a far-field profile is identically zero (K proportional to I)."""


class CalibrationError(MomentflowError):
    """Raised when amplitude calibration cannot reach its target."""
