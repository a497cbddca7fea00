class QuditError(Exception):
    """Base class for every error raised by the simulator and harness."""


class DimensionCapError(QuditError):
    """Register or matrix size exceeds the configured amplitude cap."""


class ShapeError(QuditError, ValueError):
    pass


class RangeError(QuditError, ValueError):
    pass


class SiteError(QuditError, ValueError):
    pass


class GeneratorIndexError(QuditError, ValueError):
    """Gell-Mann indices violate 1 <= j < k <= d' (X, Y) or 1 <= j <= d'-1 (Z)."""


class ValidationError(QuditError):
    pass


class DomainError(QuditError, ValueError):
    pass


class SingularCoefficientError(QuditError, ZeroDivisionError):
    """Weingarten coefficient 1/(d^2 - 1) undefined at d = 1."""


class ConfigError(QuditError, ValueError):
    pass


class FitError(QuditError):
    pass
