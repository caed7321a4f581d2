"""Lindblad simulation of two LC oscillators coupled through an InP HEMT.

Modules: :mod:`hemtq.fock` (truncated Fock algebra), :mod:`hemtq.circuit`
(circuit constants to Hamiltonian), :mod:`hemtq.lindblad` (master equation
integration and correlations), :mod:`hemtq.analysis` (covariance, discord,
coherence, spectra), :mod:`hemtq.config` / :mod:`hemtq.scenarios` /
:mod:`hemtq.output` (scenario pipelines and files), :mod:`hemtq.cli`.
"""

from .errors import (
    ConfigError,
    CoefficientError,
    DimensionError,
    HemtqError,
    IntegrationError,
    NonHermitianError,
    NonPhysicalCovarianceError,
    SingularCircuitError,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "CoefficientError",
    "DimensionError",
    "HemtqError",
    "IntegrationError",
    "NonHermitianError",
    "NonPhysicalCovarianceError",
    "SingularCircuitError",
    "__version__",
]
