"""Exception types shared across the package."""


class GaplessError(Exception):
    """Base class for all package errors."""


class DomainError(GaplessError):
    """Input outside the mathematical domain (e.g. a half-plane point with y <= 0)."""


class UnsupportedDimensionError(GaplessError):
    """Operation only defined for a specific ambient dimension."""


class ConfigError(GaplessError):
    """Invalid parameter or configuration value."""


class NoConvergenceError(GaplessError):
    """Eigenvalue bracket exhausted or iteration failed to converge."""


class NotAnEigenvalueError(GaplessError):
    """Residual check rejected the supplied eigenvalue candidate."""


class DegenerateInputError(GaplessError):
    """Input is degenerate (e.g. identically zero samples)."""


class ResolutionError(GaplessError):
    """Grid too coarse to resolve the requested quantity."""


class ShapeAnomalyError(GaplessError):
    """Eigenfunction samples do not show the expected qualitative shape."""
