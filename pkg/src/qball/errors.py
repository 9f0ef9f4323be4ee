"""Exception types shared across the solver library."""


class QBallError(Exception):
    """Base class for all library errors."""


class InvalidNumber(QBallError):
    """A parameter or sample is NaN or infinite."""


class ParameterError(QBallError):
    """Model parameters violate the admissibility conditions."""


class GridError(QBallError):
    """Bad grid construction arguments or sample/grid length mismatch."""


class NumericsError(QBallError):
    """A functional evaluation produced a non-finite value."""


class SolverError(QBallError):
    """The linear gauge solve failed (singular or non-finite system)."""


class OptionsError(QBallError):
    """Solver options are inconsistent (for example trial radius >= r_max)."""


class StalledError(QBallError):
    """Line search could not find a decrease. Carries the partial state."""

    def __init__(self, message, profile=None, report=None):
        super().__init__(message)
        self.profile = profile
        self.report = report


class TrivialCollapse(QBallError):
    """Descent converged to the trivial solution (no I < 0 certificate).

    Carries the last profile and report so callers can inspect or persist
    the collapsed state.
    """

    def __init__(self, message, profile=None, report=None):
        super().__init__(message)
        self.profile = profile
        self.report = report


class BlowUpError(QBallError):
    """Outward integration left the physical amplitude range."""

    def __init__(self, message, radius=None):
        super().__init__(message)
        self.radius = radius


class NoMatchError(QBallError):
    """Shooting Newton failed to match the far-field conditions."""

    def __init__(self, message, attempts=None):
        super().__init__(message)
        self.attempts = attempts or []


class AnalysisError(QBallError):
    """A property check could not be evaluated (window too small/empty)."""


class ConfigError(QBallError):
    """Run configuration file is missing, malformed, or fails validation."""
