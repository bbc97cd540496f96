"""
Exceptions raised by the restriction lab.
Every failure the experiments can signal has its own class so the CLI can
map it to an exit code and a readable message.
"""


class LabError(Exception):
    """Base class for all lab errors."""


class InvalidExponentError(LabError, ValueError):
    """A Lebesgue index (or ambient dimension) outside its admissible range."""


class DimensionMismatchError(LabError, ValueError):
    """Point dimension does not match the ambient dimension of a function or grid."""


class DomainError(LabError, ValueError):
    """Argument outside the domain of an operation (angles, widths, radii)."""


class InsufficientTruncationError(LabError):
    """Quadrature box too small: the estimated tail exceeds the tolerance."""

    def __init__(self, tail_bound, tolerance=1e-12):
        self.tail_bound = tail_bound
        self.tolerance = tolerance
        super().__init__(
            f"Truncation tail bound {tail_bound:.3e} exceeds tolerance {tolerance:.1e}"
        )


class UnderResolvedGridError(LabError):
    """The torus grid cannot resolve the smallest Knapp cap."""

    def __init__(self, nodes, required):
        self.nodes = nodes
        self.required = required
        super().__init__(
            f"Grid with {nodes} nodes per circle is under-resolved (need at least {required})"
        )


class FactorizationMismatchError(LabError):
    """Iterated partial transforms disagree with the direct transform."""


class ZeroNormError(LabError, ZeroDivisionError):
    """A restriction ratio was requested for a function with zero L^p norm."""


class InconclusiveGrowthError(LabError):
    """Tail growth fits none of the converged / logarithmic / polynomial classes."""


class ConfigError(LabError):
    """Malformed config file or flag value; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
