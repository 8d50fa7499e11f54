"""Error taxonomy shared across the package."""


class StripVortexError(Exception):
    """Base class for all package errors."""


class GeometryError(StripVortexError):
    """Obstacle descriptor is invalid (wall contact, self-intersection, ...)."""


class ConfigurationError(StripVortexError):
    """Run configuration violates a structural requirement (e.g. pi/h not integer)."""


class DomainError(StripVortexError):
    """Evaluation point outside the open strip or the fluid domain."""


class SingularEvaluationError(StripVortexError):
    """Kernel evaluated at coincident points."""


class PreconditionError(StripVortexError):
    """Operation called outside its certified parameter range."""


class IllConditionedPanelizationError(StripVortexError):
    """Collocation matrix condition estimate exceeds the solver bound."""


class NearSingularQuadratureError(StripVortexError):
    """Boundary-integral evaluation requested too close to the panel layer."""


class RegimeError(StripVortexError):
    """Operation requires a parameter regime the configuration is not in."""


class RegionError(StripVortexError):
    """Scan or solve region is empty after masking."""


class InfeasibleRegionError(StripVortexError):
    """Region too small to carry the requested vortex mass."""


class SupportExplosionError(StripVortexError):
    """Vorticity support exceeded its cell budget (diverging iteration)."""


class NonConvergenceError(StripVortexError):
    """Fixed-point iteration cycled or hit the iteration cap.

    Carries the last two iterates for post-mortem inspection.
    """

    def __init__(self, message, last_states=None):
        super().__init__(message)
        self.last_states = last_states or []


class BoundaryContactError(StripVortexError):
    """Vorticity support touched the discrete boundary of its target region."""


class FieldFormatError(StripVortexError):
    """Field or report file failed validation on load."""


class ValidationError(ConfigurationError):
    """A configuration field violates its invariant; names the field."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
