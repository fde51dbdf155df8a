"""Exception types shared across the package."""


class SurfError(Exception):
    """Base class for all library errors."""


class InvalidInputError(SurfError, ValueError):
    """Malformed image, rectangle, configuration or file contents."""


class DegenerateFitError(SurfError):
    """Interest-point interpolation produced no usable peak."""


class ZeroDescriptorError(SurfError):
    """Every gradient sample in the descriptor region was zero."""


class PointAtInfinityError(SurfError):
    """A homography sent a point to the line at infinity."""


class MetricDomainError(SurfError):
    """A stability metric is undefined for the supplied sets."""
