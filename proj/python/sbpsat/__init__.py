"""Summation-by-parts second-derivative operators, SAT boundary treatment and free-parameter analysis."""

from ._core import (
    BETA_ACCURACY,
    BETA_BANDWIDTH,
    NumericalError,
    SbpError,
    UsageError,
    alpha_star,
    alpha_star_spectral,
    borrowing,
    build_d2,
    compatibility,
    compatibility_min_alpha,
    heat,
    moore_penrose,
    optimum_sweep,
    poisson,
    sat_matrix,
    spectrum,
    truncation_optimum,
    verify,
    wave,
)

__all__ = [
    "BETA_ACCURACY",
    "BETA_BANDWIDTH",
    "NumericalError",
    "SbpError",
    "UsageError",
    "alpha_star",
    "alpha_star_spectral",
    "borrowing",
    "build_d2",
    "compatibility",
    "compatibility_min_alpha",
    "heat",
    "moore_penrose",
    "optimum_sweep",
    "poisson",
    "sat_matrix",
    "spectrum",
    "truncation_optimum",
    "verify",
    "wave",
]
