"""Exception and warning types shared across the package."""


class HorographError(Exception):
    """Base class for package-specific errors."""


class EmptyDomain(HorographError):
    """The domain is degenerate or its grid mask has no interior node."""


class NonPositiveBoundaryData(HorographError):
    """Horizontal-length boundary data must be strictly positive."""


class NonPositiveLength(HorographError):
    """A horizontal length g <= 0 was fed to an operator kernel."""


class OutsideValidity(HorographError):
    """Point lies outside the region where an oracle surface is positive."""


class InvalidParams(HorographError):
    """Barrier parameters or bounds violate their positivity constraints."""


class HypothesisViolated(HorographError):
    """The smallness hypothesis g_max < g_min*(1 + sqrt(pi/2)) fails."""


class ConfigError(HorographError):
    """A run configuration file is missing keys or holds bad values."""


class SolverError(HorographError):
    """Base class for Newton solver failures."""


class NewtonDiverged(SolverError):
    """Newton hit its iteration cap before reaching the residual tolerance."""


class LineSearchStalled(SolverError):
    """Armijo backtracking shrank the step below the configured minimum."""


class SingularJacobian(SolverError):
    """The sparse Jacobian factorization failed (numerically singular)."""


class CollarEmptyWarning(UserWarning):
    """The barrier collar width exceeded the domain inradius and was shrunk."""


class DegenerateLimitWarning(UserWarning):
    """The eps = 0 limit solve failed; the smallest successful eps is final."""
