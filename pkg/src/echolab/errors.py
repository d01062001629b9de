"""Exception hierarchy shared across the package.

Each CLI-visible failure mode maps to a distinct exit code (see `cli.py`).
"""


class EchoLabError(Exception):
    """Base class for all echolab errors."""


class InvalidParameterError(EchoLabError):
    """A geometry/model parameter is out of its valid range."""


class UnsupportedSymmetryError(EchoLabError):
    """The requested symmetry reduction does not apply to this shape."""


class IncompleteBasisError(EchoLabError):
    """Weyl audit found missing (or spurious) levels in a solve window."""

    def __init__(self, message, suspected_intervals=None):
        super().__init__(message)
        self.suspected_intervals = list(suspected_intervals or [])


class ConvergenceError(EchoLabError):
    """An iterative or basis-limited computation failed to converge."""


class QuadratureError(EchoLabError):
    """Successive quadrature refinements disagree beyond tolerance."""


class TruncationError(EchoLabError):
    """An overlap-matrix column loses more probability than allowed."""


class GridLeakageError(EchoLabError):
    """A retained 1D eigenfunction has non-negligible amplitude at a grid edge."""


class InsufficientBoundStatesError(EchoLabError):
    """Fewer bound states exist than were requested."""


class StepSizeError(EchoLabError):
    """Propagation time step too coarse for the retained energy range."""


class NoMinimumError(EchoLabError):
    """The trap potential has no local minimum (no oscillation period)."""


class AmbiguousTrackingError(EchoLabError):
    """Level tracking could not disambiguate states within the bisection budget."""


class ConfigError(EchoLabError):
    """Run configuration failed validation."""


class CacheError(EchoLabError):
    """Base class for persistence failures."""


class CorruptEntryError(CacheError):
    """Cache entry failed its checksum."""


class VersionMismatchError(CacheError):
    """Cache entry was written with an incompatible format version."""
