"""Finite difference and pseudospectral solvers for the 1D Dirac equation.

Wave functions are numpy arrays of shape (N, 2), complex128, one row per grid node.
"""

from ._pydirac import (
    ConfigError,
    Config,
    Problem,
    SolverError,
    StabilityViolation,
    convergence_table,
    free_dirac_exact,
    load_config,
    measure_errors,
    parse_config,
    presets,
    reference,
    run,
    schemes,
    stability,
    tau_max,
)

__all__ = [
    "ConfigError",
    "Config",
    "Problem",
    "SolverError",
    "StabilityViolation",
    "convergence_table",
    "free_dirac_exact",
    "load_config",
    "measure_errors",
    "parse_config",
    "presets",
    "reference",
    "run",
    "schemes",
    "stability",
    "tau_max",
]
