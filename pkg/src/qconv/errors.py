class InvalidDimensionError(ValueError):
    """Dimension is not a power of two, or two operands disagree."""


class ZeroVectorError(ValueError):
    pass


class CapacityError(ValueError):
    """Requested size exceeds the dense-simulation envelope."""


class PostselectionError(RuntimeError):
    pass


class NotInvertibleError(ValueError):
    pass


class PromiseViolationError(ValueError):
    """Spectrum enters the excluded interval around zero."""


class DataError(ValueError):
    pass
