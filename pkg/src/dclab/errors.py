"""Exception types shared across the package."""


class DclabError(Exception):
    """Base class for all errors raised by this package."""


# ---------------------------------------------------------------------------
# graph construction
# ---------------------------------------------------------------------------

class GraphError(DclabError):
    pass


class SelfLoopError(GraphError):
    """An edge (i, i) was supplied."""


class DuplicateEdgeError(GraphError):
    """The same edge (up to orientation for undirected graphs) appears twice."""


class VertexOutOfRangeError(GraphError):
    """An edge endpoint is outside 1..n."""


class ParameterOutOfRangeError(GraphError):
    """A family parameter violates its documented range."""


# ---------------------------------------------------------------------------
# spectral / stability analysis
# ---------------------------------------------------------------------------

class AnalysisError(DclabError):
    pass


class RootNotBracketedError(AnalysisError):
    """A bracketed root search found no sign change."""


class EigensolverError(AnalysisError):
    """A dense (generalized) eigensolver failed to converge."""


class ZeroVectorError(AnalysisError):
    """A nonzero vector was required."""


class IllConditionedInterpolationError(AnalysisError):
    """Determinant interpolation could not recover reliable coefficients."""


class NotUndirectedError(AnalysisError):
    """The operation is only defined for undirected graphs."""


class DisconnectedError(AnalysisError):
    """The operation requires a connected graph."""


class NotMarginalError(AnalysisError):
    """The system is not marginally stable at the requested parameter value."""


class MultiplicityAboveOneError(AnalysisError):
    """The zero eigenvalue has geometric multiplicity above one.

    The limit-projector formula needs geometric multiplicity one; the partial
    mode (without projector) is attached as ``.mode`` when available.
    """

    def __init__(self, message, mode=None):
        super().__init__(message)
        self.mode = mode


class ZeroOffdiagonalError(AnalysisError):
    """Sturm counting requires nonzero off-diagonal entries."""


class NoBracketError(AnalysisError):
    """Both ends of a sweep interval classify identically."""


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------

class SimulationError(DclabError):
    pass


class StepMismatchError(SimulationError):
    """dt does not divide a switching-segment length."""


class DimensionMismatchError(SimulationError):
    """State vector dimension does not match the graph."""


class EpsilonOutOfRangeError(SimulationError):
    """Discrete step-size outside (0, 1/d_max)."""


class FitDidNotConvergeError(SimulationError):
    """Oscillation fitting failed to find a credible sinusoid."""


class WindowTooShortError(SimulationError):
    """Fit window is outside the trajectory or has too few samples."""


# ---------------------------------------------------------------------------
# steering service
# ---------------------------------------------------------------------------

class ServiceError(DclabError):
    pass


class InvalidGraphError(ServiceError):
    """Session creation received an unusable graph description."""


class CapacityExceededError(ServiceError):
    """Too many concurrent sessions."""


class UnknownSessionError(ServiceError):
    """No session with the requested id."""
