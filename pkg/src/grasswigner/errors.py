"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class GrassmannError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(GrassmannError, ValueError):
    pass


class InvalidDimension(GrassmannError, ValueError):
    pass


class MalformedInput(GrassmannError, ValueError):
    pass


class RankDeficient(GrassmannError, ValueError):
    pass


class NoConvergence(GrassmannError, RuntimeError):
    pass


class MixedDimensions(GrassmannError, ValueError):
    pass


class DuplicateVertex(GrassmannError, ValueError):
    pass


class Unreachable(GrassmannError):
    pass


class NotCompatible(GrassmannError, ValueError):
    pass


class InsufficientAmbient(GrassmannError, ValueError):
    pass


class DegenerateDirection(GrassmannError, ValueError):
    pass


class NotUnitary(GrassmannError, ValueError):
    pass


class InvalidDescriptor(GrassmannError, ValueError):
    pass


class MaximalityViolation(GrassmannError):
    """A supposedly maximal compatible family was extended by a probe."""


class SingularOperator(GrassmannError, ValueError):
    pass


class NotOrthogonalityPreserving(GrassmannError, ValueError):
    pass


class OracleDimensionError(GrassmannError):
    pass


class OracleLookupError(GrassmannError, KeyError):
    """A finite pairing table has no entry for the queried subspace."""


class IntersectionNotALine(GrassmannError):
    def __init__(self, dim: int):
        super().__init__(f"image intersection has dimension {dim}, expected 1")
        self.dim = dim


class ReconstructionFailed(GrassmannError):
    """Raised by the reconstruction pipeline; ``stage`` names the failing step.

    Stages: ``line-extraction``, ``normalization``,
    ``endo-decision ambiguous``, ``validation``.
    """

    def __init__(self, stage: str, detail: str = ""):
        super().__init__(f"{stage}: {detail}" if detail else stage)
        self.stage = stage
        self.detail = detail


class RetryExhausted(GrassmannError):
    pass


class StarImageNotInStar(GrassmannError):
    pass
