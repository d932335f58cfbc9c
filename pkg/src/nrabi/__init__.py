"""n-level atoms under multi-laser drive: closed-form and numerical propagators."""

from .errors import (
    ConditionError,
    ConvergenceError,
    DegenerateSpectrumError,
    IntegrationError,
    InvalidInputError,
)
from .model import (
    ConditionReport,
    CouplingMatrix,
    LevelSystem,
    StateVector,
    build_q,
    check_consistency,
    check_resonance,
    default_condition_tolerance,
    frame_matrix,
    full_solution,
    hamiltonian_full,
    hamiltonian_rwa,
    rotating_frame_hamiltonian,
)
from .oracle import (
    IntegrationConfig,
    TimeSeries,
    integrate_schrodinger,
    reference_expm,
    rk4_step,
    rwa_error,
)
from .propagator import (
    EigenDecomposition,
    LagrangeCoeffs,
    Method,
    Propagator,
    eigenvectors_three_level,
    jacobi_eigendecompose,
    lagrange_coeffs,
    propagator,
    propagator_equal_coupling,
    propagator_from_eigen,
    propagator_lagrange,
    propagator_two_level,
)
from .roots import (
    CubicCoeffs,
    QuarticCoeffs,
    Spectrum,
    char_poly_3,
    char_poly_4,
    closed_form_spectrum,
    solve_cubic_depressed,
    solve_quartic,
)

__version__ = "0.1.0"

__all__ = [
    "ConditionError",
    "ConditionReport",
    "ConvergenceError",
    "CouplingMatrix",
    "CubicCoeffs",
    "DegenerateSpectrumError",
    "EigenDecomposition",
    "IntegrationConfig",
    "IntegrationError",
    "InvalidInputError",
    "LagrangeCoeffs",
    "LevelSystem",
    "Method",
    "Propagator",
    "QuarticCoeffs",
    "Spectrum",
    "StateVector",
    "TimeSeries",
    "build_q",
    "char_poly_3",
    "char_poly_4",
    "check_consistency",
    "check_resonance",
    "closed_form_spectrum",
    "default_condition_tolerance",
    "eigenvectors_three_level",
    "frame_matrix",
    "full_solution",
    "hamiltonian_full",
    "hamiltonian_rwa",
    "integrate_schrodinger",
    "jacobi_eigendecompose",
    "lagrange_coeffs",
    "propagator",
    "propagator_equal_coupling",
    "propagator_from_eigen",
    "propagator_lagrange",
    "propagator_two_level",
    "reference_expm",
    "rk4_step",
    "rotating_frame_hamiltonian",
    "rwa_error",
    "solve_cubic_depressed",
    "solve_quartic",
    "__version__",
]
