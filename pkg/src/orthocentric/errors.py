"""Exception hierarchy shared by all modules.

Every error derives from :class:`OrthocentricError` so callers (and the
CLI) can map families of failures onto exit codes.
"""


class OrthocentricError(Exception):
    """Base class for all library errors."""


class InvalidParams(OrthocentricError, ValueError):
    """Cone parameters violate the admissibility conditions."""


class ZeroParameter(InvalidParams):
    """A cone parameter is exactly zero."""


class InvalidIntermediateParams(InvalidParams):
    """A derived parameter tuple (face, tangent or normal cone) is inadmissible."""


class EmptySubset(OrthocentricError, ValueError):
    pass


class InvalidSubset(OrthocentricError, ValueError):
    pass


class NonPositiveArgument(OrthocentricError, ValueError):
    pass


class DomainTooLarge(OrthocentricError, ValueError):
    """Argument lies outside the region where a series is numerically safe."""


class QuadratureFailure(OrthocentricError, ArithmeticError):
    """Adaptive quadrature could not reach the requested tolerance."""


class NonPositiveTau(OrthocentricError, ValueError):
    pass


class NuEqualsOne(OrthocentricError, ValueError):
    pass


class DegenerateVertices(OrthocentricError, ValueError):
    """Vertices are affinely dependent (or too few to span a simplex)."""


class NotOrthocentric(OrthocentricError, ValueError):
    """Raised when an orthocentric simplex is required but not supplied."""


class FaceOutOfRange(OrthocentricError, ValueError):
    pass


class CombinatorialBudgetExceeded(OrthocentricError, RuntimeError):
    pass


class CholeskyFailure(OrthocentricError, ArithmeticError):
    pass


class SingularGenerators(OrthocentricError, ValueError):
    pass


class ProjectionNonConvergence(OrthocentricError, ArithmeticError):
    pass
