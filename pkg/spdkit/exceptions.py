"""
Exception hierarchy for the spdkit package.

Every error raised by the library derives from SpdError so callers (the
management commands in particular) can catch one type and still report the
specific failure.
"""


class SpdError(Exception):
    """Base class for all spdkit errors."""


class InvalidSpd(SpdError, ValueError):
    """A matrix failed the symmetry or positive-definiteness check."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class DimensionMismatch(SpdError, ValueError):
    pass


class DegenerateMatrix(SpdError):
    """An eigenvalue fell below the positive-definite floor."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class EigenDecompositionError(SpdError):
    pass


class MaxIterExceeded(SpdError):
    """An iterative method hit its iteration cap before meeting its tolerance."""

    def __init__(self, message, iterate=None, residual=None):
        super().__init__(message)
        self.iterate = iterate
        self.residual = residual


class SolverDivergence(SpdError):
    """The objective returned a non-finite value."""

    def __init__(self, message, iterate=None):
        super().__init__(message)
        self.iterate = iterate


class InvalidGram(SpdError):
    pass


class RankDeficient(SpdError):
    """A covariance descriptor is not positive definite at the requested ridge."""

    def __init__(self, message, min_eigenvalue=None, suggested_ridge=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue
        self.suggested_ridge = suggested_ridge


class ConstructionFailed(SpdError):
    pass


class FeatureError(SpdError, ValueError):
    pass


class ClassDistanceError(SpdError):
    """Wraps a per-class distance failure raised while classifying."""

    def __init__(self, label, cause):
        super().__init__(f"class {label!r}: {cause}")
        self.label = label
        self.cause = cause
