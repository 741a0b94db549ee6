"""Seasonal nonlocal dispersal: principal eigenvalues, periodic orbits and long-time fate."""

from ._core import (
    Error,
    ExtinctionRegime,
    HypothesisViolation,
    InvalidArgument,
    Model,
    NumericalError,
    __version__,
    constant_orbit_value,
    run_cli,
    theta_metric,
)

__all__ = [
    "Error",
    "ExtinctionRegime",
    "HypothesisViolation",
    "InvalidArgument",
    "Model",
    "NumericalError",
    "__version__",
    "constant_orbit_value",
    "run_cli",
    "theta_metric",
]
