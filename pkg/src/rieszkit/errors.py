"""Exception and warning types raised across rieszkit."""


class RieszkitError(Exception):
    """Base class for all errors raised by this package."""


class PoleError(RieszkitError, ValueError):
    """A gamma-function argument hit a nonpositive integer.

    ``where`` is ``"numerator"`` or ``"denominator"`` so callers can tell an
    infinite constant from one that vanishes.
    """

    def __init__(self, message, where="numerator"):
        super().__init__(message)
        self.where = where


class DegenerateConstant(RieszkitError, ValueError):
    """A normalizing constant is zero or infinite for the requested parameters."""


class DomainError(RieszkitError, ValueError):
    pass


class DimensionError(RieszkitError, ValueError):
    pass


class GeometryMismatch(RieszkitError, ValueError):
    pass


class CoverageError(RieszkitError, ValueError):
    pass


class ModeError(RieszkitError, RuntimeError):
    pass


class FormatError(RieszkitError, ValueError):
    """A binary grid or sinogram file is malformed."""


class NumericalWarning(UserWarning):
    """Base class for warnings the CLI escalates under ``--strict``."""


class BoundaryWarning(NumericalWarning):
    pass


class QuadratureWarning(NumericalWarning):
    pass


class ResolutionWarning(NumericalWarning):
    pass


class DecayWarning(NumericalWarning):
    pass
