"""Exception types shared across the package."""


class InvalidOperatorError(ValueError):
    """A matrix fails the structural contract of the operation (Hermiticity,
    unitarity, orthonormality, trace preservation)."""


class UnsupportedDimensionError(ValueError):
    """Operation requested on a matrix dimension outside the supported set."""


class SupportViolationError(ValueError):
    """Relative entropy is infinite: the first state has weight outside the
    support of the second.  Raised instead of returning a large float so that
    downstream averages fail loudly."""


class NonUnitalFeedbackError(ValueError):
    """Feedback channel is not unital, which breaks the fluctuation identity
    the path enumeration is built to verify."""


class DegenerateMarginalError(ValueError):
    """A feedback marginal p(k) is zero, so the information weight ln p(k|l)/p(k)
    is undefined for realized paths."""
