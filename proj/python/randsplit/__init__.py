"""Randomized domain-decomposition splitting for p-Laplace evolution problems."""

from ._core import (
    SolverError,
    __version__,
    apply_operator,
    batch_law,
    default_config,
    exact_solution,
    fit_order,
    mc_error,
    normalize_config,
    run_checks,
    simulate,
    sweep,
)

__all__ = [
    "SolverError",
    "__version__",
    "apply_operator",
    "batch_law",
    "default_config",
    "exact_solution",
    "fit_order",
    "mc_error",
    "normalize_config",
    "run_checks",
    "simulate",
    "sweep",
]
