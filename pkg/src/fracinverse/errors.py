"""Exception types raised by the solver library."""


class FracInverseError(Exception):
    """Base class for all library errors."""


class DomainError(FracInverseError, ValueError):
    """A parameter lies outside its admissible range."""


class DimensionError(FracInverseError, ValueError):
    """Vector or matrix sizes do not match the operator."""


class ResourceError(FracInverseError):
    """A dense or FFT workspace would exceed the configured cap."""


class SingularBlockError(FracInverseError):
    """A diagonal block of the block-triangular system is numerically singular.

    ``time_index`` is the 1-based time level of the offending block; the
    regularization block is reported as ``S + 1``.
    """

    def __init__(self, time_index, message=None):
        self.time_index = time_index
        super().__init__(message or f"singular diagonal block at time index {time_index}")
