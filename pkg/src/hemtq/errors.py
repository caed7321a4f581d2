"""Exception hierarchy shared by every hemtq module."""


class HemtqError(Exception):
    """Base class for all errors raised by hemtq."""


class DimensionError(HemtqError, ValueError):
    """Invalid truncation dimension, mode index or mismatched spaces."""


class SingularCircuitError(HemtqError, ArithmeticError):
    """The derived capacitance determinant C_M^2 vanishes."""


class CoefficientError(HemtqError, ArithmeticError):
    """A Hamiltonian coefficient evaluated to a non-finite number."""


class NonHermitianError(HemtqError):
    """A Hamiltonian assembled from printed terms is not Hermitian.

    ``term`` holds the index (in printed order) of the first term whose
    inclusion broke Hermiticity, or ``None`` when it could not be isolated.
    """

    def __init__(self, message, term=None):
        super().__init__(message)
        self.term = term


class IntegrationError(HemtqError):
    """The fixed-step integrator drifted beyond its trace/Hermiticity bounds."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class NonPhysicalCovarianceError(HemtqError, ValueError):
    """Covariance matrix violates the symplectic-eigenvalue discriminant."""


class ConfigError(HemtqError, ValueError):
    """Configuration file could not be parsed or failed validation."""
