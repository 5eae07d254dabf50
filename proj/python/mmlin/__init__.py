"""Pseudo-first-order Michaelis-Menten kinetics.

Thin Python layer over the C++ core: closed-form linear solutions,
comparison bounds, convergence-order and timescale diagnostics, and
rate-constant fitting.
"""

from ._core import (
    BiexpSolution,
    DerivedConstants,
    EigenPair,
    FitResult,
    IntegratorConfig,
    InvalidInput,
    LinearTriple,
    NumericalFailure,
    Observation,
    OrderReport,
    RateParams,
    SandwichReport,
    SeparationThresholds,
    State,
    SupError,
    TimescaleReport,
    Trajectory,
    analyze,
    biexp_solve,
    convergence_order,
    derive_constants,
    eigen,
    evaluate,
    fit_rates,
    horizon,
    in_region_D,
    integrate_linear,
    integrate_mm,
    lower_triple,
    mm_jacobian,
    mm_linear_solution,
    mm_linear_triple,
    mm_rhs,
    reduced_solution,
    residuals,
    sandwich_check,
    slow_eigenvalue_approx,
    slow_eigenvector_approx,
    sup_error,
    synthesize,
    upper_triple,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
