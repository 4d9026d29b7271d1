"""Python access to the ctunnel gap solvers."""

from ._ctunnel import (
    ConfigError,
    ContractViolation,
    NumericFailure,
    Potential,
    __version__,
    asymptotic_constant,
    complex_action,
    gap_prediction,
    gap_report,
    transport_prefactor,
    validate_config,
    wkb_eigenvalue,
)

__all__ = [
    "ConfigError",
    "ContractViolation",
    "NumericFailure",
    "Potential",
    "__version__",
    "asymptotic_constant",
    "complex_action",
    "gap_prediction",
    "gap_report",
    "transport_prefactor",
    "validate_config",
    "wkb_eigenvalue",
]
