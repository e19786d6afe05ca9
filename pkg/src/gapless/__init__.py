"""Numerical laboratory for the fundamental gap of hyperbolic strip domains."""

from .chain import (
    KappaChain,
    alpha_exponent,
    chain_bound_margins,
    chain_gap,
    kappa_step,
    radial_eigenfunction,
    radial_separation_constant,
)
from .errors import (
    ConfigError,
    DegenerateInputError,
    DomainError,
    GaplessError,
    NoConvergenceError,
    NotAnEigenvalueError,
    ResolutionError,
    ShapeAnomalyError,
    UnsupportedDimensionError,
)
from .gap import (
    GapReport,
    GapTerms,
    IntegralBoundCheck,
    ShapeReport,
    analyze_gap,
    integral_bound_check,
    rayleigh_difference_direct,
    rayleigh_difference_terms,
    shape_report,
    test_function_psi,
)
from .geometry import (
    HalfPlanePoint,
    StripDomain,
    cartesian_to_polar,
    corner_points,
    diameter,
    diameter_bounds,
    hyperbolic_distance,
    neck_check,
    polar_to_cartesian,
)
from .logspace import LogValue, format_number
from .slcore import (
    DEFAULT_CONFIG,
    PRECISION_M_CAP,
    EigenSolution,
    Parity,
    SolverConfig,
    WeightMode,
    WeightedSLProblem,
    bracket_lambda1,
    eigenfunction_residual,
    eigenfunction_samples,
    eigenvalue_bracket,
    eigenvalue_gap,
    matrix_eigenvalue,
    matrix_eigenvalue_extrapolated,
    rayleigh_quotient,
    solution_rayleigh,
    solve_eigen_matrix,
    solve_eigen_shooting,
    solve_gap_pair,
    with_config,
)

__version__ = "0.1.0"
