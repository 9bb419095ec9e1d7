"""Exception hierarchy for the softimpact package."""


class SoftImpactError(Exception):
    """Base class for all package-specific errors."""


class DomainError(SoftImpactError, ValueError):
    """Input violates a documented precondition or domain restriction."""


class InfeasibleEnergyError(DomainError):
    """Requested energy leaves no kinetic margin for the section momentum."""


class StartOnWallError(DomainError):
    """Collision search started from a state on or beyond a wall."""


class DegenerateCollisionError(SoftImpactError):
    """Degenerate tangency or corner entry; the hard-wall flow is undefined."""


class EventOverflowError(SoftImpactError):
    """Too many wall events in one propagation (corner chatter guard)."""


class EscapeError(SoftImpactError):
    """Trajectory crossed the wall crest; energy exceeds the barrier window."""


class EnergyDriftExceededError(SoftImpactError):
    """Relative energy drift of an integration exceeded the configured abort level."""


class StepUnderflowError(SoftImpactError):
    """Adaptive integrator failed to take a step at the requested tolerance."""


class SectionTimeoutError(SoftImpactError):
    """Requested number of section crossings not found within the time budget."""


class NoRootError(SoftImpactError):
    """Shooting scan found no sign change for the orbit condition."""


class NoConvergenceError(SoftImpactError):
    """Iterative orbit solve did not converge within the iteration budget."""


class SingularLinearizationError(SoftImpactError):
    """A denominator in the analytic return-map factors is numerically zero."""


class NotSymplecticError(SoftImpactError):
    """Monodromy determinant too far from one for a stability classification."""


class ConfigError(SoftImpactError):
    """Invalid experiment configuration (CLI exit code 2)."""
