"""Exception hierarchy shared by all kppspread modules."""


class KppSpreadError(Exception):
    """Base class for every error raised by this package."""


class DomainError(KppSpreadError, ValueError):
    """An evaluation point or level is outside the admissible domain."""


class ParameterError(KppSpreadError, ValueError):
    """A parameter violates a documented precondition."""


class DegenerateProfileError(KppSpreadError):
    """Operation requires a nonconstant periodic growth profile."""


class ConvergenceError(KppSpreadError):
    """An iterative solve failed to reach its tolerance."""


class DiscretizationError(KppSpreadError):
    """A discretized operator produced an inconsistent result (grid too coarse)."""


class SchemeError(KppSpreadError):
    """The time stepper violated a structural invariant (e.g. range preservation)."""


class CoverageError(KppSpreadError):
    """A verification region is empty on the requested domain."""


class InsufficientDataError(KppSpreadError):
    """A trace is too short for the requested estimate."""


class ConfigError(KppSpreadError, ValueError):
    """A scenario configuration failed schema validation."""
