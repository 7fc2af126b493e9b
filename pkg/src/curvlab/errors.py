"""Exception types raised across the package."""


class CurvlabError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(CurvlabError, ValueError):
    pass


class InvalidCurvatureError(CurvlabError, ValueError):
    """Input tensor violates the algebraic curvature symmetries."""


class InconsistentInputError(CurvlabError, ValueError):
    """Inputs disagree with each other beyond tolerance."""


class InternalConsistencyError(CurvlabError, RuntimeError):
    """An identity that must hold exactly failed; signals a convention bug."""


class DomainError(CurvlabError, ValueError):
    """Stencil leaves the chart domain."""


class InvalidMetricError(CurvlabError, ValueError):
    """Metric is not symmetric positive definite at a queried point."""


class DegenerateInputError(CurvlabError, ValueError):
    pass


class UnsupportedModelError(CurvlabError, ValueError):
    pass


class NotFoundError(CurvlabError, KeyError):
    pass
